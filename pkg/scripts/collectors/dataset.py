"""Dataset - the encoded universe every sampling protocol draws from"""
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

import numpy as np

from errors import ValidationError

# Sensitive attribute coding: 0 is the unprivileged group a0, 1 the privileged a1
A0 = 0
A1 = 1
GROUP_NAMES = {A0: 'a0', A1: 'a1'}


def parse_group(value) -> int:
    """Accept 0/1 or 'a0'/'a1' and return the integer group code"""
    if isinstance(value, str):
        key = value.strip().lower()
        if key in ('a0', '0'):
            return A0
        if key in ('a1', '1'):
            return A1
    elif value in (0, 1):
        return int(value)
    raise ValidationError(f"Unknown group '{value}' (expected a0 or a1)")


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class Dataset:
    """Encoded feature matrix with binary label Y and binary sensitive A.

    Values are immutable after construction; every transformation returns a
    new Dataset whose `provenance` extends the parent's lineage text.
    `lineage` holds, per row, the row_id of the original row it descends from
    (itself for original rows).
    """
    features: np.ndarray
    labels: np.ndarray
    sensitive: np.ndarray
    row_ids: np.ndarray
    feature_names: Tuple[str, ...]
    numeric_mask: np.ndarray = None
    feature_means: np.ndarray = None
    feature_scales: np.ndarray = None
    lineage: np.ndarray = None
    sensitive_feature_index: Optional[int] = None
    provenance: str = ''

    def __post_init__(self):
        features = np.asarray(self.features, dtype=float)
        if features.ndim != 2:
            raise ValidationError(f"features must be a 2-D matrix, got shape {features.shape}")
        n, d = features.shape
        labels = np.asarray(self.labels).astype(np.int64)
        sensitive = np.asarray(self.sensitive).astype(np.int64)
        row_ids = np.asarray(self.row_ids).astype(np.int64)
        lineage = row_ids if self.lineage is None else np.asarray(self.lineage).astype(np.int64)

        for name, vec in (('labels', labels), ('sensitive', sensitive), ('row_ids', row_ids), ('lineage', lineage)):
            if vec.shape != (n,):
                raise ValidationError(f"{name} has length {vec.shape[0] if vec.ndim else 0}, expected {n}")
        if not np.all(np.isfinite(features)):
            raise ValidationError("features contain NaN or infinite entries")
        if np.any((labels != 0) & (labels != 1)):
            raise ValidationError(f"labels must be 0/1, found {sorted(set(labels.tolist()) - {0, 1})}")
        if np.any((sensitive != A0) & (sensitive != A1)):
            raise ValidationError(f"sensitive must be a0/a1, found {sorted(set(sensitive.tolist()) - {0, 1})}")
        if len(self.feature_names) != d:
            raise ValidationError(f"{len(self.feature_names)} feature names for {d} columns")

        numeric_mask = np.zeros(d, dtype=bool) if self.numeric_mask is None else np.asarray(self.numeric_mask, dtype=bool)
        means = np.zeros(d) if self.feature_means is None else np.asarray(self.feature_means, dtype=float)
        scales = np.ones(d) if self.feature_scales is None else np.asarray(self.feature_scales, dtype=float)
        if self.sensitive_feature_index is not None and not 0 <= self.sensitive_feature_index < d:
            raise ValidationError(f"sensitive_feature_index {self.sensitive_feature_index} out of range")

        object.__setattr__(self, 'features', _frozen(features))
        object.__setattr__(self, 'labels', _frozen(labels))
        object.__setattr__(self, 'sensitive', _frozen(sensitive))
        object.__setattr__(self, 'row_ids', _frozen(row_ids))
        object.__setattr__(self, 'lineage', _frozen(lineage))
        object.__setattr__(self, 'numeric_mask', _frozen(numeric_mask))
        object.__setattr__(self, 'feature_means', _frozen(means))
        object.__setattr__(self, 'feature_scales', _frozen(scales))
        object.__setattr__(self, 'feature_names', tuple(self.feature_names))

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def group_indices(self, group: int) -> np.ndarray:
        return np.flatnonzero(self.sensitive == group)

    def cell_indices(self, group: int, label: int) -> np.ndarray:
        return np.flatnonzero((self.sensitive == group) & (self.labels == label))

    def take(self, indices: Sequence[int], note: str = '') -> 'Dataset':
        """Row subset (or reordering) by position, keeping row ids and lineage"""
        idx = np.asarray(indices, dtype=np.int64)
        return replace(
            self,
            features=self.features[idx],
            labels=self.labels[idx],
            sensitive=self.sensitive[idx],
            row_ids=self.row_ids[idx],
            lineage=self.lineage[idx],
            provenance=self._extend(note),
        )

    def append_rows(self, features: np.ndarray, labels: np.ndarray, sensitive: np.ndarray,
                    lineage: np.ndarray, note: str = '') -> 'Dataset':
        """New rows get fresh row ids above the current maximum"""
        count = len(labels)
        start = int(self.row_ids.max()) + 1 if self.n else 0
        return replace(
            self,
            features=np.vstack([self.features, np.asarray(features, dtype=float).reshape(count, self.d)]),
            labels=np.concatenate([self.labels, labels]),
            sensitive=np.concatenate([self.sensitive, sensitive]),
            row_ids=np.concatenate([self.row_ids, np.arange(start, start + count)]),
            lineage=np.concatenate([self.lineage, lineage]),
            provenance=self._extend(note),
        )

    def _extend(self, note: str) -> str:
        if not note:
            return self.provenance
        return f"{self.provenance}; {note}" if self.provenance else note


@dataclass(frozen=True)
class GroupStats:
    """Per-group counts and positive rates; rates are None for empty groups"""
    m0: int
    m1: int
    pos_rate_a0: Optional[float]
    pos_rate_a1: Optional[float]
    group_fraction_a1: float

    def group_fraction(self, group: int) -> float:
        return self.group_fraction_a1 if group == A1 else 1.0 - self.group_fraction_a1


def group_stats(ds: Dataset) -> GroupStats:
    if ds.n < 1:
        raise ValidationError("group_stats needs at least one row")
    counts = {}
    rates = {}
    for group in (A0, A1):
        mask = ds.sensitive == group
        counts[group] = int(mask.sum())
        rates[group] = float(ds.labels[mask].sum()) / counts[group] if counts[group] else None
    return GroupStats(
        m0=counts[A0],
        m1=counts[A1],
        pos_rate_a0=rates[A0],
        pos_rate_a1=rates[A1],
        group_fraction_a1=counts[A1] / ds.n,
    )
