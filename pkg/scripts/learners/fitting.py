"""Uniform fit / predict entry points over every learner"""
import logging
from typing import Optional, Tuple

import numpy as np

from collectors.dataset import Dataset
from errors import ValidationError
from .base import ConstantModel, ForestSpec, KnnSpec, LearnerSpec, LogRegSpec, Model, TreeSpec
from .forest import fit_forest
from .knn import fit_knn
from .logistic import fit_logistic
from .tree import fit_tree

logger = logging.getLogger(__name__)

FITTERS = {
    LogRegSpec: fit_logistic,
    TreeSpec: fit_tree,
    KnnSpec: fit_knn,
    ForestSpec: fit_forest,
}


def check_weights(weights: Optional[np.ndarray], n: int) -> np.ndarray:
    if weights is None:
        return np.ones(n)
    w = np.asarray(weights, dtype=float)
    if w.shape != (n,):
        raise ValidationError(f"weights have shape {w.shape}, expected ({n},)")
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise ValidationError("weights must be finite and nonnegative")
    if not np.any(w > 0):
        raise ValidationError("weights need at least one strictly positive entry")
    return w


def fit(spec: LearnerSpec, train: Dataset, weights: Optional[np.ndarray] = None) -> Model:
    """Fit a learner; single-class training data yields a degenerate ConstantModel"""
    if train.n == 0:
        raise ValidationError("cannot fit on an empty training set")
    w = check_weights(weights, train.n)
    y = train.labels.astype(float)
    present = np.unique(train.labels[w > 0])
    if present.shape[0] == 1:
        logger.debug(f"  degenerate training set: only class {int(present[0])}")
        return ConstantModel(float(present[0]), train.d)
    fitter = FITTERS.get(type(spec))
    if fitter is None:
        raise ValidationError(f"unsupported learner spec {type(spec).__name__}")
    return fitter(spec, train.features, y, w, train.numeric_mask)


def predict_batch(model: Model, eval_set: Dataset) -> Tuple[np.ndarray, np.ndarray]:
    """Labels and scores for every row; labels are scores >= 0.5"""
    if eval_set.d != model.n_features:
        raise ValidationError(f"evaluation data has {eval_set.d} features, model expects {model.n_features}")
    scores = np.clip(model.predict_scores(eval_set.features), 0.0, 1.0)
    return model.predict_labels(eval_set.features), scores
