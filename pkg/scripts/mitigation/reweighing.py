"""Reweighing: row weights that make group and label independent in the training sample.

    w(a, y) = P(A=a) * P(Y=y) / P(A=a, Y=y)

Cell weights are kept as exact fractions, so the weighted cell masses
n_ay * w(a, y) equal n * P(a) * P(y) with no rounding.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Tuple

import numpy as np

from collectors.dataset import A0, A1, GROUP_NAMES, Dataset
from errors import ValidationError

logger = logging.getLogger(__name__)

Cell = Tuple[int, int]
CELLS: Tuple[Cell, ...] = ((A0, 0), (A0, 1), (A1, 0), (A1, 1))


@dataclass(frozen=True)
class ReweighingWeights:
    cell_weights: Dict[Cell, Fraction]
    cell_counts: Dict[Cell, int]
    row_weights: np.ndarray
    degenerate_cells: Tuple[Cell, ...]

    @property
    def degenerate(self) -> bool:
        return bool(self.degenerate_cells)

    def cell_mass(self, cell: Cell) -> Fraction:
        """Total weight carried by one (group, label) cell"""
        return self.cell_counts[cell] * self.cell_weights[cell]

    def to_dict(self):
        return {
            'cell_weights': {f"{GROUP_NAMES[a]},y={y}": float(w) for (a, y), w in self.cell_weights.items()},
            'degenerate_cells': [f"{GROUP_NAMES[a]},y={y}" for a, y in self.degenerate_cells],
        }


def reweighing_weights(ds: Dataset) -> ReweighingWeights:
    if ds.n < 1:
        raise ValidationError("reweighing needs at least one row")
    n = ds.n
    group_counts = {a: int((ds.sensitive == a).sum()) for a in (A0, A1)}
    label_counts = {y: int((ds.labels == y).sum()) for y in (0, 1)}
    counts = {(a, y): int(ds.cell_indices(a, y).shape[0]) for a, y in CELLS}

    weights = {}
    degenerate = []
    for cell in CELLS:
        a, y = cell
        if counts[cell] == 0:
            weights[cell] = Fraction(0)
            degenerate.append(cell)
        else:
            weights[cell] = Fraction(group_counts[a] * label_counts[y], n * counts[cell])

    rows = np.zeros(n)
    for (a, y), w in weights.items():
        rows[(ds.sensitive == a) & (ds.labels == y)] = float(w)
    if degenerate:
        logger.debug(f"  reweighing: empty cells {degenerate}")
    return ReweighingWeights(weights, counts, rows, tuple(degenerate))
