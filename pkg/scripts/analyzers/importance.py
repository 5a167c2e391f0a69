"""Sensitive-feature importance: permutation importance and exact linear attribution"""
import numpy as np

from collectors.dataset import Dataset
from errors import FitError, ValidationError
from learners.base import Model
from learners.logistic import LogisticModel


def _zol(model: Model, X: np.ndarray, labels: np.ndarray) -> float:
    return float(np.mean(model.predict_labels(X) != labels))


def permutation_importance(model: Model, eval_set: Dataset, feature_index: int,
                           repeats: int = 5, seed: int = 0) -> float:
    """Mean rise in zero-one loss when one column is shuffled, clamped at 0.

    Each repeat draws an independent permutation of the column from a
    generator seeded once with `seed`.
    """
    if not 0 <= feature_index < eval_set.d:
        raise ValidationError(f"feature index {feature_index} out of range for {eval_set.d} features")
    if repeats < 1:
        raise ValidationError(f"repeats must be >= 1, got {repeats}")
    rng = np.random.default_rng(seed)
    X = np.array(eval_set.features, copy=True)
    column = X[:, feature_index].copy()
    baseline = _zol(model, X, eval_set.labels)

    increases = []
    for _ in range(repeats):
        X[:, feature_index] = rng.permutation(column)
        increases.append(_zol(model, X, eval_set.labels) - baseline)
    return max(float(np.mean(increases)), 0.0)


def linear_attribution(model: Model, eval_set: Dataset) -> np.ndarray:
    """Per-feature mean |coef_i * (x_i - mean_i)| over the evaluation rows"""
    if not isinstance(model, LogisticModel):
        raise FitError(f"linear attribution needs a logistic model, got {type(model).__name__}")
    if eval_set.d != model.n_features:
        raise ValidationError(f"evaluation data has {eval_set.d} features, model expects {model.n_features}")
    centered = eval_set.features - eval_set.features.mean(axis=0)
    return np.mean(np.abs(centered * model.raw_coefficients), axis=0)
