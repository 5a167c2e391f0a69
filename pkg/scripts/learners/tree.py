"""CART classification tree with weighted Gini splits"""
from typing import List, Optional

import numpy as np

from .base import Model, TreeSpec

# Split scores within this distance count as tied; ties go to the lowest
# feature index, then the lowest threshold
TIE_TOLERANCE = 1e-12


class TreeModel(Model):
    """Flat node arrays; leaves have left == -1 and carry the score in value"""

    def __init__(self, feature, threshold, left, right, value, n_features: int):
        super().__init__(n_features)
        self.feature = np.asarray(feature, dtype=np.int64)
        self.threshold = np.asarray(threshold, dtype=float)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.value = np.asarray(value, dtype=float)

    @property
    def n_nodes(self) -> int:
        return self.value.shape[0]

    def predict_scores(self, X: np.ndarray) -> np.ndarray:
        out = np.empty(X.shape[0])
        stack = [(0, np.arange(X.shape[0]))]
        while stack:
            node, idx = stack.pop()
            if self.left[node] < 0:
                out[idx] = self.value[node]
                continue
            goes_left = X[idx, self.feature[node]] <= self.threshold[node]
            stack.append((self.left[node], idx[goes_left]))
            stack.append((self.right[node], idx[~goes_left]))
        return out


class _Builder:
    def __init__(self, X, y, w, max_depth, min_leaf, max_features: Optional[int], rng):
        self.X = X
        self.y = y
        self.w = w
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.max_features = max_features
        self.rng = rng
        self.feature: List[int] = []
        self.threshold: List[float] = []
        self.left: List[int] = []
        self.right: List[int] = []
        self.value: List[float] = []

    def _new_node(self, value: float) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(value)
        return len(self.value) - 1

    def _candidate_features(self) -> np.ndarray:
        d = self.X.shape[1]
        if self.max_features is None or self.max_features >= d:
            return np.arange(d)
        return np.sort(self.rng.choice(d, self.max_features, replace=False))

    def _best_split(self, idx: np.ndarray, total: float, positive: float):
        best_score = 2.0 * positive * (total - positive) / total - TIE_TOLERANCE
        best = None
        w = self.w[idx]
        wp = w * self.y[idx]
        for j in self._candidate_features():
            column = self.X[idx, j]
            order = np.argsort(column, kind='stable')
            xs = column[order]
            cw = np.cumsum(w[order])[:-1]
            cp = np.cumsum(wp[order])[:-1]
            rw = total - cw
            rp = positive - cp
            valid = (xs[:-1] < xs[1:]) & (cw >= self.min_leaf) & (rw >= self.min_leaf)
            if not valid.any():
                continue
            with np.errstate(divide='ignore', invalid='ignore'):
                score = 2.0 * cp * (cw - cp) / cw + 2.0 * rp * (rw - rp) / rw
            score = np.where(valid, score, np.inf)
            low = score.min()
            if low < best_score:
                pos = np.flatnonzero(score <= low + TIE_TOLERANCE)[0]
                best_score = low - TIE_TOLERANCE
                best = (int(j), 0.5 * (xs[pos] + xs[pos + 1]))
        return best

    def build(self, idx: np.ndarray, depth: int) -> int:
        total = self.w[idx].sum()
        positive = (self.w[idx] * self.y[idx]).sum()
        node = self._new_node((positive + 1.0) / (total + 2.0))
        if depth >= self.max_depth or total < 2 * self.min_leaf or positive <= 0 or positive >= total:
            return node
        split = self._best_split(idx, total, positive)
        if split is None:
            return node
        j, threshold = split
        goes_left = self.X[idx, j] <= threshold
        self.feature[node] = j
        self.threshold[node] = threshold
        self.left[node] = self.build(idx[goes_left], depth + 1)
        self.right[node] = self.build(idx[~goes_left], depth + 1)
        return node


def grow_tree(X: np.ndarray, y: np.ndarray, w: np.ndarray, max_depth: int, min_leaf: float,
              max_features: Optional[int] = None, rng: np.random.Generator = None) -> TreeModel:
    """Leaf score is the Laplace-smoothed weighted positive fraction (P+1)/(W+2)"""
    builder = _Builder(X, y, w, max_depth, min_leaf, max_features, rng)
    builder.build(np.arange(X.shape[0]), 0)
    return TreeModel(builder.feature, builder.threshold, builder.left, builder.right,
                     builder.value, X.shape[1])


def fit_tree(spec: TreeSpec, X: np.ndarray, y: np.ndarray, w: np.ndarray,
             numeric_mask: np.ndarray = None) -> TreeModel:
    return grow_tree(X, y, w, spec.max_depth, spec.min_leaf)
