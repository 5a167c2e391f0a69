"""Learner specs, the Model interface and shared preprocessing"""
from abc import ABC, abstractmethod
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional, Union

import numpy as np

from errors import ConfigError

# Scores at exactly the threshold are labelled positive, everywhere in the toolkit
LABEL_THRESHOLD = 0.5


@dataclass(frozen=True)
class LogRegSpec:
    lr: float = 1.0
    l2: float = 5.0
    max_iters: int = 1000
    tol: float = 1e-8
    seed: int = 0
    kind = 'logreg'

    def __post_init__(self):
        _require(self.lr > 0, 'lr', self.lr)
        _require(self.l2 >= 0, 'l2', self.l2)
        _require(self.max_iters >= 0, 'max_iters', self.max_iters)
        _require(self.tol >= 0, 'tol', self.tol)


@dataclass(frozen=True)
class TreeSpec:
    max_depth: int = 6
    min_leaf: float = 5
    seed: int = 0
    kind = 'tree'

    def __post_init__(self):
        _require(self.max_depth > 0, 'max_depth', self.max_depth)
        _require(self.min_leaf > 0, 'min_leaf', self.min_leaf)


@dataclass(frozen=True)
class KnnSpec:
    k: int = 5
    seed: int = 0
    kind = 'knn'

    def __post_init__(self):
        _require(self.k > 0, 'k', self.k)


@dataclass(frozen=True)
class ForestSpec:
    n_trees: int = 25
    max_depth: int = 6
    min_leaf: float = 5
    feature_subsample: Union[str, float, int] = 'sqrt'
    seed: int = 0
    kind = 'forest'

    def __post_init__(self):
        _require(self.n_trees > 0, 'n_trees', self.n_trees)
        _require(self.max_depth > 0, 'max_depth', self.max_depth)
        _require(self.min_leaf > 0, 'min_leaf', self.min_leaf)
        if isinstance(self.feature_subsample, str):
            _require(self.feature_subsample == 'sqrt', 'feature_subsample', self.feature_subsample)
        else:
            _require(self.feature_subsample > 0, 'feature_subsample', self.feature_subsample)

    def features_per_split(self, d: int) -> int:
        value = self.feature_subsample
        if value == 'sqrt':
            count = int(np.sqrt(d))
        elif isinstance(value, float) and value <= 1.0:
            count = int(value * d)
        else:
            count = int(value)
        return min(d, max(1, count))


LearnerSpec = Union[LogRegSpec, TreeSpec, KnnSpec, ForestSpec]
SPEC_TYPES = {cls.kind: cls for cls in (LogRegSpec, TreeSpec, KnnSpec, ForestSpec)}


def _require(ok: bool, name: str, value) -> None:
    if not ok:
        raise ConfigError(f"invalid learner hyperparameter {name}={value!r}", token=name)


def spec_to_dict(spec: LearnerSpec) -> Dict[str, Any]:
    return {'kind': spec.kind, **asdict(spec)}


def spec_from_dict(data: Dict[str, Any]) -> LearnerSpec:
    data = dict(data)
    kind = data.pop('kind', 'logreg')
    if kind not in SPEC_TYPES:
        raise ConfigError(f"unknown learner '{kind}' (expected one of {sorted(SPEC_TYPES)})", token=kind)
    cls = SPEC_TYPES[kind]
    allowed = set(cls.__dataclass_fields__)
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"unknown {kind} hyperparameter(s): {unknown}", token=unknown[0])
    return cls(**data)


class Model(ABC):
    """Fitted classifier; immutable after fit and safe to share across workers"""

    def __init__(self, n_features: int, degenerate: bool = False):
        self.n_features = n_features
        self.degenerate = degenerate

    @abstractmethod
    def predict_scores(self, X: np.ndarray) -> np.ndarray:
        """Scores in [0, 1], one per row of X"""

    def predict_labels(self, X: np.ndarray) -> np.ndarray:
        return (self.predict_scores(X) >= LABEL_THRESHOLD).astype(np.int64)


class ConstantModel(Model):
    """Returned when training data holds a single class"""

    def __init__(self, score: float, n_features: int):
        super().__init__(n_features, degenerate=True)
        self.score = float(score)

    def predict_scores(self, X: np.ndarray) -> np.ndarray:
        return np.full(X.shape[0], self.score)


class Standardizer:
    """Weighted zero-mean/unit-variance scaling of the numeric columns only.

    Binary indicator columns (one-hot blocks, the sensitive attribute) pass
    through unchanged. Zero-variance columns keep scale 1.
    """

    def __init__(self, mean: np.ndarray, scale: np.ndarray):
        self.mean = mean
        self.scale = scale

    @classmethod
    def fit(cls, X: np.ndarray, weights: np.ndarray, numeric_mask: Optional[np.ndarray]) -> 'Standardizer':
        d = X.shape[1]
        mean = np.zeros(d)
        scale = np.ones(d)
        if numeric_mask is not None and numeric_mask.any():
            cols = np.flatnonzero(numeric_mask)
            mu = np.average(X[:, cols], axis=0, weights=weights)
            var = np.average((X[:, cols] - mu) ** 2, axis=0, weights=weights)
            sd = np.sqrt(var)
            mean[cols] = mu
            scale[cols] = np.where(sd > 0, sd, 1.0)
        return cls(mean, scale)

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (X - self.mean) / self.scale
