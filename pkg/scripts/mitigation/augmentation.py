"""Data augmentation: random oversampling and SMOTE within (group, label) cells.

Every output keeps the input rows unchanged and in place; new rows are
appended with fresh row ids and a lineage pointing at the row they were
copied or interpolated from. SMOTE interpolates in the encoded feature
space and does not re-discretize one-hot blocks.
"""
import logging
from fractions import Fraction
from typing import Dict, Tuple

import numpy as np
from scipy.spatial.distance import cdist

from collectors.dataset import GROUP_NAMES, Dataset
from errors import ValidationError
from sampling.determinism import round_half_up
from .reweighing import CELLS, Cell

logger = logging.getLogger(__name__)

STRATEGIES = ('oversample', 'smote')


def _cell_name(cell: Cell) -> str:
    return f"({GROUP_NAMES[cell[0]]}, y={cell[1]})"


def oversample_random(ds: Dataset, target_counts: Dict[Cell, int], seed: int) -> Dataset:
    """Duplicate rows uniformly with replacement within each cell up to its target count"""
    rng = np.random.default_rng(seed)
    picks = []
    for cell in CELLS:
        if cell not in target_counts:
            continue
        rows = ds.cell_indices(*cell)
        target = int(target_counts[cell])
        if target < rows.shape[0]:
            raise ValidationError(f"cell {_cell_name(cell)} has {rows.shape[0]} rows, above target {target}")
        extra = target - rows.shape[0]
        if extra == 0:
            continue
        if rows.shape[0] == 0:
            raise ValidationError(f"cell {_cell_name(cell)} is empty, cannot oversample to {target}")
        picks.append(rng.choice(rows, extra, replace=True))
    if not picks:
        return ds
    idx = np.concatenate(picks)
    return ds.append_rows(ds.features[idx], ds.labels[idx], ds.sensitive[idx], ds.lineage[idx],
                          f"oversample +{idx.shape[0]} seed={seed}")


def _smote_rows(X: np.ndarray, n_new: int, k: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    dist = cdist(X, X, metric='sqeuclidean')
    np.fill_diagonal(dist, np.inf)
    neighbors = np.argsort(dist, axis=1, kind='stable')[:, :k]
    seeds = rng.integers(0, X.shape[0], n_new)
    partners = neighbors[seeds, rng.integers(0, k, n_new)]
    t = rng.random(n_new)[:, None]
    return X[seeds] + t * (X[partners] - X[seeds]), seeds


def smote(ds: Dataset, minority_cell: Cell, n_new: int, k: int = 5, seed: int = 0) -> Dataset:
    """Append n_new synthetic rows to a cell: seed + t * (neighbour - seed), t ~ U[0, 1].

    The neighbour is uniform among the seed's k nearest same-cell rows
    (Euclidean, encoded space). Label and sensitive value come from the cell.
    """
    if n_new < 0:
        raise ValidationError(f"n_new must be >= 0, got {n_new}")
    if k < 1:
        raise ValidationError(f"SMOTE needs k >= 1, got {k}")
    rows = ds.cell_indices(*minority_cell)
    if rows.shape[0] < k + 1:
        raise ValidationError(
            f"SMOTE with k={k} needs at least {k + 1} rows in cell {_cell_name(minority_cell)}, found {rows.shape[0]}"
        )
    if n_new == 0:
        return ds
    rng = np.random.default_rng(seed)
    synthetic, seeds = _smote_rows(ds.features[rows], n_new, k, rng)
    group, label = minority_cell
    return ds.append_rows(
        synthetic,
        np.full(n_new, label, dtype=np.int64),
        np.full(n_new, group, dtype=np.int64),
        ds.lineage[rows[seeds]],
        f"smote {_cell_name(minority_cell)} +{n_new} k={k} seed={seed}",
    )


def grow_group(ds: Dataset, group: int, target_size: int, strategy: str, seed: int, k: int = 5) -> Dataset:
    """Grow one group's rows to target_size, new rows split across its label cells
    in proportion to the current cell counts (positives rounded half up).

    SMOTE caps k at cell size - 1 and falls back to duplication for a cell
    holding a single row.
    """
    if strategy not in STRATEGIES:
        raise ValidationError(f"unknown augmentation strategy '{strategy}' (expected one of {STRATEGIES})")
    current = int((ds.sensitive == group).sum())
    if target_size < current:
        raise ValidationError(f"group {GROUP_NAMES[group]} already has {current} rows, above target {target_size}")
    if current == 0:
        raise ValidationError(f"group {GROUP_NAMES[group]} has no rows to grow from")
    extra = target_size - current
    if extra == 0:
        return ds
    positives = int(ds.cell_indices(group, 1).shape[0])
    new_pos = round_half_up(Fraction(extra * positives, current))
    allocation = {(group, 1): new_pos, (group, 0): extra - new_pos}
    logger.debug(f"  {strategy}: {GROUP_NAMES[group]} {current} -> {target_size} (+{new_pos} positive)")

    if strategy == 'oversample':
        return oversample_random(ds, {cell: ds.cell_indices(*cell).shape[0] + count
                                      for cell, count in allocation.items()}, seed)

    out = ds
    for offset, cell in enumerate(((group, 0), (group, 1))):
        count = allocation[cell]
        size = ds.cell_indices(*cell).shape[0]
        if count == 0:
            continue
        if size >= 2:
            out = smote(out, cell, count, min(k, size - 1), seed + offset)
        else:
            out = oversample_random(out, {cell: out.cell_indices(*cell).shape[0] + count}, seed + offset)
    return out
