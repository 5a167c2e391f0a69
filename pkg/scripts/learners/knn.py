"""k-nearest-neighbour classifier over standardized features"""
import numpy as np
from scipy.spatial.distance import cdist

from .base import KnnSpec, Model, Standardizer

CHUNK_ROWS = 512


class KnnModel(Model):
    """Score = weighted fraction of positive labels among the k nearest rows.

    Distance ties resolve to the lower training index. Training rows with
    zero weight are not stored.
    """

    def __init__(self, k: int, standardizer: Standardizer, Z: np.ndarray, y: np.ndarray, w: np.ndarray):
        super().__init__(Z.shape[1])
        self.k = min(k, Z.shape[0])
        self.standardizer = standardizer
        self.Z = Z
        self.y = y
        self.w = w

    def predict_scores(self, X: np.ndarray) -> np.ndarray:
        Q = self.standardizer.transform(X)
        out = np.empty(Q.shape[0])
        for start in range(0, Q.shape[0], CHUNK_ROWS):
            block = Q[start:start + CHUNK_ROWS]
            dist = cdist(block, self.Z, metric='sqeuclidean')
            nearest = np.argsort(dist, axis=1, kind='stable')[:, :self.k]
            w = self.w[nearest]
            out[start:start + block.shape[0]] = (w * self.y[nearest]).sum(axis=1) / w.sum(axis=1)
        return out


def fit_knn(spec: KnnSpec, X: np.ndarray, y: np.ndarray, w: np.ndarray,
            numeric_mask: np.ndarray = None) -> KnnModel:
    keep = w > 0
    standardizer = Standardizer.fit(X[keep], w[keep], numeric_mask)
    return KnnModel(spec.k, standardizer, standardizer.transform(X[keep]), y[keep].astype(float), w[keep])
