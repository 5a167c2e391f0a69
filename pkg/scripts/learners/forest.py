"""Random forest: bagged CART trees with per-split feature subsampling"""
from typing import List

import numpy as np

from sampling.determinism import LEARNER_STREAM, derive_seed
from .base import ForestSpec, Model
from .tree import TreeModel, grow_tree


class ForestModel(Model):
    def __init__(self, trees: List[TreeModel], n_features: int):
        super().__init__(n_features)
        self.trees = trees

    def predict_scores(self, X: np.ndarray) -> np.ndarray:
        return np.mean([tree.predict_scores(X) for tree in self.trees], axis=0)


def tree_seed(forest_seed: int, tree_index: int) -> int:
    return derive_seed(forest_seed, LEARNER_STREAM, tree_index)


def bootstrap_counts(n: int, seed: int) -> np.ndarray:
    """How many times each of n rows appears in a size-n bootstrap draw"""
    rng = np.random.default_rng(seed)
    return np.bincount(rng.integers(0, n, n), minlength=n).astype(float)


def fit_forest(spec: ForestSpec, X: np.ndarray, y: np.ndarray, w: np.ndarray,
               numeric_mask: np.ndarray = None) -> ForestModel:
    """Tree t bootstraps with tree_seed(spec.seed, t); bootstrap counts multiply the row weights"""
    n, d = X.shape
    max_features = spec.features_per_split(d)
    trees = []
    for t in range(spec.n_trees):
        seed = tree_seed(spec.seed, t)
        weights = w * bootstrap_counts(n, seed)
        rng = np.random.default_rng(seed)
        trees.append(grow_tree(X, y, weights, spec.max_depth, spec.min_leaf, max_features, rng))
    return ForestModel(trees, d)
