"""Synthetic Collector - seeded two-group populations for desk-scale audits"""
import logging

import numpy as np

from errors import ValidationError
from .dataset import A0, A1, Dataset

logger = logging.getLogger(__name__)


class SyntheticCollector:
    """Per-group Bernoulli labels with class-conditional Gaussian features.

    Class means sit at -signal/2 and +signal/2 along the diagonal direction,
    so the Euclidean distance between them is exactly `signal` and label
    recoverability grows with it. Features do not depend on A given Y.
    """

    def __init__(self, n0: int, n1: int, pos_rate_a0: float, pos_rate_a1: float,
                 d: int = 2, signal: float = 1.0, seed: int = 0,
                 include_sensitive_as_feature: bool = True):
        if n0 < 1 or n1 < 1:
            raise ValidationError(f"group sizes must be >= 1, got n0={n0}, n1={n1}")
        for name, rate in (('pos_rate_a0', pos_rate_a0), ('pos_rate_a1', pos_rate_a1)):
            if not 0.0 <= rate <= 1.0:
                raise ValidationError(f"{name} must lie in [0, 1], got {rate}")
        if d < 1:
            raise ValidationError(f"feature count d must be >= 1, got {d}")
        if signal < 0:
            raise ValidationError(f"signal must be >= 0, got {signal}")
        self.n0 = int(n0)
        self.n1 = int(n1)
        self.rates = {A0: float(pos_rate_a0), A1: float(pos_rate_a1)}
        self.d = int(d)
        self.signal = float(signal)
        self.seed = int(seed)
        self.include_sensitive_as_feature = include_sensitive_as_feature

    def collect(self) -> Dataset:
        rng = np.random.default_rng(self.seed)
        sensitive = np.concatenate([np.full(self.n0, A0), np.full(self.n1, A1)])
        labels = np.empty(sensitive.shape[0], dtype=np.int64)
        for group, count in ((A0, self.n0), (A1, self.n1)):
            mask = sensitive == group
            labels[mask] = rng.random(count) < self.rates[group]

        offset = self.signal / (2.0 * np.sqrt(self.d))
        centers = np.where(labels[:, None] == 1, offset, -offset)
        features = centers + rng.standard_normal((sensitive.shape[0], self.d))
        names = [f"x{j}" for j in range(self.d)]
        numeric_mask = [True] * self.d

        sensitive_index = None
        if self.include_sensitive_as_feature:
            sensitive_index = self.d
            features = np.hstack([features, sensitive[:, None].astype(float)])
            names.append('sensitive=a1')
            numeric_mask.append(False)

        logger.debug(f"  synthetic population: n0={self.n0}, n1={self.n1}, d={self.d}, signal={self.signal}")
        return Dataset(
            features=features,
            labels=labels,
            sensitive=sensitive,
            row_ids=np.arange(sensitive.shape[0]),
            feature_names=tuple(names),
            numeric_mask=np.array(numeric_mask),
            sensitive_feature_index=sensitive_index,
            provenance=(
                f"synthetic n0={self.n0} n1={self.n1} rates={self.rates[A0]}/{self.rates[A1]} "
                f"d={self.d} signal={self.signal} seed={self.seed}"
            ),
        )


def generate_synthetic(n0: int, n1: int, pos_rate_a0: float, pos_rate_a1: float,
                       d: int = 2, signal: float = 1.0, seed: int = 0,
                       include_sensitive_as_feature: bool = True) -> Dataset:
    return SyntheticCollector(n0, n1, pos_rate_a0, pos_rate_a1, d, signal, seed,
                              include_sensitive_as_feature).collect()


if __name__ == '__main__':
    ds = generate_synthetic(1000, 1000, 0.1, 0.9, d=3, signal=2.0, seed=7)
    print(f"Generated {ds.n} rows, {ds.d} features, positive rate {ds.labels.mean():.3f}")
