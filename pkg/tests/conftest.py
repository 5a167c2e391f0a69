import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / 'scripts'))

from collectors.dataset import Dataset  # noqa: E402
from collectors.synthetic_collector import generate_synthetic  # noqa: E402


def make_dataset(features, labels, sensitive, numeric=True, sensitive_feature_index=None) -> Dataset:
    features = np.asarray(features, dtype=float)
    if features.ndim == 1:
        features = features[:, None]
    d = features.shape[1]
    return Dataset(
        features=features,
        labels=labels,
        sensitive=sensitive,
        row_ids=np.arange(features.shape[0]),
        feature_names=tuple(f"x{j}" for j in range(d)),
        numeric_mask=np.full(d, numeric),
        sensitive_feature_index=sensitive_feature_index,
    )


@pytest.fixture
def tiny():
    """labels [1,0,1,0], sensitive [a1,a1,a0,a0]"""
    return make_dataset([[0.0], [1.0], [2.0], [3.0]], [1, 0, 1, 0], [1, 1, 0, 0])


@pytest.fixture(scope='session')
def biased_population():
    return generate_synthetic(400, 800, 0.1, 0.9, d=2, signal=1.0, seed=3)
