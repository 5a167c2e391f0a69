from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from analyzers import LossKind, MetricKind, auc, discrimination, group_cost, loss
from collectors import A0, A1
from errors import ConfigError, ValidationError

PREDS = [1, 0, 1, 0]
LABELS = [0, 0, 1, 1]
GROUPS = [A1, A1, A0, A0]


def binary_arrays(min_size=1, max_size=60):
    return st.integers(min_size, max_size).flatmap(
        lambda n: st.tuples(
            st.lists(st.integers(0, 1), min_size=n, max_size=n),
            st.lists(st.integers(0, 1), min_size=n, max_size=n),
            st.lists(st.integers(0, 1), min_size=n, max_size=n),
        )
    )


@pytest.mark.parametrize('kind, y_hat, y, expected', [
    (LossKind.SL, 1, 1, 0.0),
    (LossKind.SL, 0, 1, 1.0),
    (LossKind.AL, 0.25, 1, 0.75),
    (LossKind.ZO, 1, 0, 1.0),
    (LossKind.ZO, 0, 0, 0.0),
])
def test_loss_values(kind, y_hat, y, expected):
    assert loss(kind, y_hat, y) == expected


def test_loss_is_elementwise():
    np.testing.assert_array_equal(loss('SL', [0.5, 1.0], [1, 1]), [0.25, 0.0])


def test_zero_one_loss_needs_hard_labels():
    with pytest.raises(ValidationError):
        loss(LossKind.ZO, 0.3, 1)


def test_group_costs_from_confusion_counts():
    assert group_cost(MetricKind.FPR, PREDS, LABELS, GROUPS, A1) == 0.5
    assert group_cost(MetricKind.EO, PREDS, LABELS, GROUPS, A0) == 0.5
    assert group_cost(MetricKind.FNR, PREDS, LABELS, GROUPS, A0) == 0.5
    assert group_cost(MetricKind.SD, PREDS, LABELS, GROUPS, A1) == 0.5
    assert group_cost(MetricKind.ZOL, PREDS, LABELS, GROUPS, A0) == 0.5


def test_group_without_negatives_has_undefined_fpr():
    # the a0 rows are both positives, so FPR has nothing to condition on
    assert group_cost(MetricKind.FPR, PREDS, LABELS, GROUPS, A0) is None
    record = discrimination(MetricKind.FPR, PREDS, None, LABELS, GROUPS)
    assert record.cost_a1 == 0.5
    assert record.disc is None
    assert not record.defined


def test_statistical_disparity_example():
    record = discrimination(MetricKind.SD, PREDS, None, LABELS, GROUPS)
    assert record.disc == 0.0
    assert (record.n_a0, record.n_a1) == (2, 2)


def test_auc_rejected_by_group_cost():
    with pytest.raises(ValidationError):
        group_cost(MetricKind.AUC, PREDS, LABELS, GROUPS, A0)


@pytest.mark.parametrize('scores, labels, expected', [
    ([0.9, 0.8, 0.3, 0.2], [1, 1, 0, 0], 1.0),
    ([0.1, 0.2, 0.3, 0.4], [0, 1, 0, 1], 0.75),
    ([0.5, 0.5, 0.5, 0.5], [0, 1, 0, 1], 0.5),
    ([0.2, 0.4], [1, 1], None),
])
def test_auc_examples(scores, labels, expected):
    assert auc(scores, labels) == expected


def brute_force_auc(scores, labels):
    pos = [s for s, y in zip(scores, labels) if y == 1]
    neg = [s for s, y in zip(scores, labels) if y == 0]
    wins = sum(Fraction(1) if p > q else Fraction(1, 2) if p == q else Fraction(0) for p in pos for q in neg)
    return wins / (len(pos) * len(neg))


@settings(max_examples=500, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 8), st.integers(0, 1)), min_size=2, max_size=200))
def test_auc_matches_pair_counting(rows):
    # scores on a coarse grid so ties are common
    scores = [s / 8 for s, _ in rows]
    labels = [y for _, y in rows]
    value = auc(scores, labels)
    if len(set(labels)) < 2:
        assert value is None
    else:
        assert value == pytest.approx(float(brute_force_auc(scores, labels)), abs=1e-12)


def test_auc_discrimination_ranks_within_groups():
    scores = [0.9, 0.1, 0.2, 0.8]
    labels = [1, 0, 1, 0]
    record = discrimination(MetricKind.AUC, [1, 0, 0, 1], scores, labels, [A1, A1, A0, A0])
    assert (record.cost_a1, record.cost_a0) == (1.0, 0.0)
    assert record.disc == 1.0


def test_auc_needs_scores():
    with pytest.raises(ValidationError):
        discrimination(MetricKind.AUC, PREDS, None, LABELS, GROUPS)


@given(binary_arrays())
def test_equal_opportunity_and_fnr_cancel(arrays):
    preds, labels, groups = arrays
    eo = discrimination(MetricKind.EO, preds, None, labels, groups)
    fnr = discrimination(MetricKind.FNR, preds, None, labels, groups)
    assert eo.defined == fnr.defined
    if eo.defined:
        assert eo.disc + fnr.disc == 0.0


@given(binary_arrays(min_size=2), st.randoms())
def test_metrics_ignore_row_order(arrays, rnd):
    preds, labels, groups = arrays
    order = list(range(len(preds)))
    rnd.shuffle(order)
    for metric in (MetricKind.FPR, MetricKind.FNR, MetricKind.EO, MetricKind.ZOL, MetricKind.SD):
        before = discrimination(metric, preds, None, labels, groups)
        after = discrimination(metric, [preds[i] for i in order], None, [labels[i] for i in order],
                               [groups[i] for i in order])
        assert before == after


@given(binary_arrays())
def test_zol_cost_is_one_minus_accuracy(arrays):
    preds, labels, groups = arrays
    for group in (A0, A1):
        rows = [i for i, g in enumerate(groups) if g == group]
        cost = group_cost(MetricKind.ZOL, preds, labels, groups, group)
        if not rows:
            assert cost is None
            continue
        accuracy = sum(preds[i] == labels[i] for i in rows) / len(rows)
        assert cost == pytest.approx(1.0 - accuracy, abs=1e-12)


@given(binary_arrays())
def test_defined_values_stay_in_range(arrays):
    preds, labels, groups = arrays
    for metric in (MetricKind.FPR, MetricKind.FNR, MetricKind.EO, MetricKind.ZOL, MetricKind.SD):
        record = discrimination(metric, preds, None, labels, groups)
        for cost in (record.cost_a0, record.cost_a1):
            assert cost is None or 0.0 <= cost <= 1.0
        assert record.disc is None or -1.0 <= record.disc <= 1.0


def test_identical_groups_have_no_discrimination():
    preds = [1, 0, 1, 1, 0, 1]
    labels = [1, 0, 0, 1, 0, 0]
    groups = [A0, A0, A0, A1, A1, A1]
    scores = [0.9, 0.2, 0.6, 0.9, 0.2, 0.6]
    for metric in MetricKind:
        assert discrimination(metric, preds, scores, labels, groups).disc == 0.0


def test_length_mismatch_fails():
    with pytest.raises(ValidationError):
        discrimination(MetricKind.SD, [1, 0], None, LABELS, GROUPS)


def test_metric_names_parse():
    assert MetricKind.parse(' fpr ') == MetricKind.FPR
    assert MetricKind.parse('TPR') == MetricKind.EO
    assert MetricKind.parse(MetricKind.AUC) == MetricKind.AUC
    with pytest.raises(ConfigError) as info:
        MetricKind.parse('F1')
    assert info.value.token == 'F1'


def test_record_serializes():
    record = discrimination(MetricKind.EO, PREDS, None, LABELS, GROUPS)
    data = record.to_dict()
    assert data['metric'] == 'EO'
    assert data['defined'] is False
    assert data['cost_a0'] == 0.5
