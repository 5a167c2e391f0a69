from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from collectors import A0, A1, group_stats
from conftest import make_dataset
from errors import ValidationError
from mitigation import CELLS, grow_group, oversample_random, reweighing_weights, smote


def cell_dataset(counts, features=None):
    """counts: {(a, y): n}"""
    labels, sensitive = [], []
    for (a, y), count in counts.items():
        labels += [y] * count
        sensitive += [a] * count
    n = len(labels)
    if features is None:
        features = np.arange(n, dtype=float)
    return make_dataset(features, labels, sensitive)


def test_balanced_cells_get_unit_weights():
    weights = reweighing_weights(cell_dataset({cell: 10 for cell in CELLS}))
    assert set(weights.cell_weights.values()) == {Fraction(1)}
    assert weights.row_weights.tolist() == [1.0] * 40
    assert not weights.degenerate


def test_reweighing_formula_example():
    ds = cell_dataset({(A1, 1): 48, (A1, 0): 12, (A0, 1): 8, (A0, 0): 32})
    weights = reweighing_weights(ds)
    assert weights.cell_weights[(A1, 1)] == Fraction(7, 10)
    assert weights.cell_weights[(A0, 1)] == Fraction(40 * 56, 100 * 8)
    assert weights.row_weights[0] == 0.7


@settings(max_examples=200)
@given(st.tuples(*[st.integers(0, 100)] * 4).filter(lambda c: sum(c) > 0))
def test_weighted_cells_are_independent(counts):
    ds = cell_dataset(dict(zip(CELLS, counts)))
    weights = reweighing_weights(ds)
    n = ds.n
    group_n = {a: int((ds.sensitive == a).sum()) for a in (A0, A1)}
    label_n = {y: int((ds.labels == y).sum()) for y in (0, 1)}
    for cell in CELLS:
        a, y = cell
        if weights.cell_counts[cell]:
            assert weights.cell_mass(cell) == Fraction(group_n[a] * label_n[y], n)
        else:
            assert cell in weights.degenerate_cells
            assert weights.cell_weights[cell] == 0


def test_independent_pool_has_unit_weights():
    ds = cell_dataset({(A0, 0): 6, (A0, 1): 2, (A1, 0): 3, (A1, 1): 1})
    assert np.all(reweighing_weights(ds).row_weights == 1.0)


def test_weights_serialize():
    data = reweighing_weights(cell_dataset({(A0, 0): 2, (A1, 1): 2})).to_dict()
    assert data['cell_weights']['a1,y=0'] == 0.0
    assert 'a1,y=0' in data['degenerate_cells']


def test_oversample_to_current_counts_is_identity(tiny):
    assert oversample_random(tiny, {(A0, 1): 1, (A1, 0): 1}, seed=0) is tiny


def test_oversample_single_row_cell():
    ds = cell_dataset({(A0, 1): 1, (A1, 0): 2})
    out = oversample_random(ds, {(A0, 1): 3}, seed=4)
    rows = out.cell_indices(A0, 1)
    assert rows.shape[0] == 3
    assert out.lineage[rows].tolist() == [0, 0, 0]
    assert out.row_ids.tolist() == [0, 1, 2, 3, 4]
    np.testing.assert_array_equal(out.features[:3], ds.features)


def test_oversample_reaches_target_rates(biased_population):
    sample = biased_population
    counts = {cell: sample.cell_indices(*cell).shape[0] for cell in CELLS}
    top = max(counts.values())
    out = oversample_random(sample, {cell: top for cell in CELLS}, seed=1)
    stats = group_stats(out)
    assert stats.pos_rate_a0 == stats.pos_rate_a1 == 0.5


def test_oversample_errors():
    ds = cell_dataset({(A0, 1): 2, (A1, 0): 2})
    with pytest.raises(ValidationError):
        oversample_random(ds, {(A0, 1): 1}, seed=0)
    with pytest.raises(ValidationError):
        oversample_random(ds, {(A1, 1): 2}, seed=0)


def _distance_to_segment(p, a, b):
    ab = b - a
    t = np.clip(np.dot(p - a, ab) / max(np.dot(ab, ab), 1e-300), 0.0, 1.0)
    return np.linalg.norm(p - (a + t * ab))


def test_smote_rows_lie_on_segments():
    rng = np.random.default_rng(0)
    ds = cell_dataset({(A0, 1): 12, (A1, 0): 5}, features=rng.standard_normal((17, 2)))
    out = smote(ds, (A0, 1), 500, k=3, seed=2)
    originals = ds.features[ds.cell_indices(A0, 1)]
    for row in range(ds.n, out.n):
        point = out.features[row]
        seed_row = ds.features[out.lineage[row]]
        assert min(_distance_to_segment(point, seed_row, other) for other in originals) < 1e-9
    assert np.all(out.labels[ds.n:] == 1)
    assert np.all(out.sensitive[ds.n:] == A0)
    np.testing.assert_array_equal(out.features[:ds.n], ds.features)


def test_smote_two_rows_interpolates_between_them():
    ds = cell_dataset({(A1, 1): 2}, features=np.array([[0.0, 0.0], [1.0, 1.0]]))
    out = smote(ds, (A1, 1), 20, k=1, seed=5)
    synthetic = out.features[2:]
    np.testing.assert_allclose(synthetic[:, 0], synthetic[:, 1])
    assert np.all((synthetic >= 0.0) & (synthetic <= 1.0))


def test_smote_errors():
    ds = cell_dataset({(A1, 1): 3, (A0, 0): 3})
    with pytest.raises(ValidationError, match='k=5'):
        smote(ds, (A1, 1), 4, k=5)
    with pytest.raises(ValidationError):
        smote(ds, (A1, 1), -1, k=1)
    assert smote(ds, (A1, 1), 0, k=2) is ds


@pytest.mark.parametrize('strategy', ['oversample', 'smote'])
def test_grow_group_keeps_label_mix(strategy):
    ds = cell_dataset({(A0, 1): 2, (A0, 0): 6, (A1, 1): 5, (A1, 0): 5},
                      features=np.random.default_rng(1).standard_normal((18, 2)))
    out = grow_group(ds, A0, 20, strategy, seed=3)
    stats = group_stats(out)
    assert stats.m0 == 20
    assert stats.m1 == 10
    # 12 new rows split 2:6, so 3 positives
    assert out.cell_indices(A0, 1).shape[0] == 5
    np.testing.assert_array_equal(out.features[:ds.n], ds.features)


def test_grow_group_smote_single_row_cell_duplicates():
    ds = cell_dataset({(A0, 1): 1, (A0, 0): 1, (A1, 1): 2}, features=np.arange(8.0).reshape(4, 2))
    out = grow_group(ds, A0, 4, 'smote', seed=0)
    assert group_stats(out).m0 == 4
    np.testing.assert_array_equal(out.features[out.cell_indices(A0, 1)], [[0.0, 1.0], [0.0, 1.0]])


def test_grow_group_errors():
    ds = cell_dataset({(A0, 1): 2, (A1, 0): 2})
    with pytest.raises(ValidationError):
        grow_group(ds, A0, 1, 'oversample', seed=0)
    with pytest.raises(ValidationError):
        grow_group(ds, A0, 4, 'mixup', seed=0)
    assert grow_group(ds, A0, 2, 'smote', seed=0) is ds
