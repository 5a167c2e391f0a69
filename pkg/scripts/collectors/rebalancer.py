"""Rebalancer - controlled-imbalance versions of a dataset"""
import logging
import math
from fractions import Fraction

import numpy as np

from errors import ValidationError
from sampling.determinism import as_fraction, round_half_up
from .dataset import A0, A1, GROUP_NAMES, Dataset

logger = logging.getLogger(__name__)


def _group_plan(positives: int, negatives: int, rate: Fraction, group: int):
    """Maximal group size n_g = floor(min(P/r, N/(1-r))) and its positive count"""
    name = GROUP_NAMES[group]
    if not 0 <= rate <= 1:
        raise ValidationError(f"target rate for {name} must lie in [0, 1], got {float(rate)}")
    limits = []
    if rate > 0:
        limits.append(Fraction(positives) / rate)
    if rate < 1:
        limits.append(Fraction(negatives) / (1 - rate))
    size = math.floor(min(limits))
    if size < 1:
        need = 'positive' if rate > 0 and positives == 0 else 'negative'
        raise ValidationError(
            f"target rate {float(rate)} is unsatisfiable for {name}: "
            f"{positives} positives, {negatives} negatives (needs a {need} row)"
        )
    if 0 < rate < 1 and (positives == 0 or negatives == 0):
        raise ValidationError(
            f"target rate {float(rate)} for {name} needs both classes, "
            f"found {positives} positives and {negatives} negatives"
        )
    n_pos = round_half_up(rate * size)
    return size, n_pos


def rebalance_outcome_rates(ds: Dataset, target_rate_a1: float, target_rate_a0: float, seed: int) -> Dataset:
    """Subsample each group to its target positive rate at the largest feasible size.

    The output is a subset of the input rows, kept in input order. Positives
    and negatives are drawn uniformly without replacement.
    """
    rng = np.random.default_rng(seed)
    targets = {A0: as_fraction(target_rate_a0), A1: as_fraction(target_rate_a1)}
    keep = []
    realized = {}
    for group in (A0, A1):
        pos_idx = ds.cell_indices(group, 1)
        neg_idx = ds.cell_indices(group, 0)
        size, n_pos = _group_plan(len(pos_idx), len(neg_idx), targets[group], group)
        n_neg = size - n_pos
        keep.append(rng.choice(pos_idx, n_pos, replace=False))
        keep.append(rng.choice(neg_idx, n_neg, replace=False))
        realized[group] = n_pos / size
        logger.info(f"  {GROUP_NAMES[group]}: {size} rows at positive rate {realized[group]:.4f} "
                    f"(target {float(targets[group]):.4f})")

    indices = np.sort(np.concatenate(keep))
    note = (
        f"rebalanced targets a1={float(targets[A1])} a0={float(targets[A0])} "
        f"realized a1={realized[A1]:.6f} a0={realized[A0]:.6f} seed={seed}"
    )
    return ds.take(indices, note)
