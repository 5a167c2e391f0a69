"""Samplers - seeded training-set draws behind the SSB, URB and augmentation sweeps"""
import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

import numpy as np

from collectors.dataset import A0, A1, GROUP_NAMES, Dataset
from errors import SamplingError, ValidationError
from .determinism import as_fraction, derive_seed, round_half_up

logger = logging.getLogger(__name__)

DEFAULT_REPEATS = 30


@dataclass(frozen=True)
class Sized:
    m: int


@dataclass(frozen=True)
class Ratio:
    m: int
    f1: float

    @property
    def m1(self) -> int:
        return round_half_up(as_fraction(self.f1) * self.m)

    @property
    def m0(self) -> int:
        return self.m - self.m1


@dataclass(frozen=True)
class GrowingGroup:
    fixed_group: int
    fixed_n: int
    growing_sizes: Tuple[int, ...]
    selective_positive_only: bool = False


ProtocolKind = Union[Sized, Ratio, GrowingGroup]


@dataclass(frozen=True)
class Protocol:
    kind: ProtocolKind
    repeats: int = DEFAULT_REPEATS
    master_seed: int = 0

    def __post_init__(self):
        if self.repeats < 1:
            raise ValidationError(f"repeats must be >= 1, got {self.repeats}")
        kind = self.kind
        if isinstance(kind, (Sized, Ratio)) and kind.m < 2:
            raise ValidationError(f"sample size m must be >= 2, got {kind.m}")
        if isinstance(kind, Ratio) and not 0 < kind.f1 < 1:
            raise ValidationError(f"split fraction f1 must lie in (0, 1), got {kind.f1}")
        if isinstance(kind, GrowingGroup):
            sizes = list(kind.growing_sizes)
            if not sizes or sizes[0] < 1 or any(b <= a for a, b in zip(sizes, sizes[1:])):
                raise ValidationError(f"growing_sizes must be strictly increasing positive integers, got {sizes}")
            if kind.fixed_n < 1:
                raise ValidationError(f"fixed_n must be >= 1, got {kind.fixed_n}")


@dataclass(frozen=True)
class SampleFamily:
    protocol: Protocol
    replicates: Tuple[Dataset, ...]

    def __len__(self) -> int:
        return len(self.replicates)


def _draw(rng: np.random.Generator, candidates: np.ndarray, count: int, stratum: str) -> np.ndarray:
    if count > len(candidates):
        shortfall = count - len(candidates)
        raise SamplingError(
            f"{stratum} has {len(candidates)} rows, {count} requested (short by {shortfall})",
            stratum=stratum, shortfall=shortfall,
        )
    return rng.choice(candidates, count, replace=False)


def sample_sized(pool: Dataset, m: int, seed: int) -> Dataset:
    """Uniform draw of exactly m rows without replacement"""
    if m < 1:
        raise SamplingError(f"sample size must be >= 1, got {m}", stratum='pool')
    rng = np.random.default_rng(seed)
    idx = _draw(rng, np.arange(pool.n), m, 'pool')
    return pool.take(idx, f"sized m={m} seed={seed}")


def sample_ratio(pool: Dataset, m: int, f1: float, seed: int) -> Dataset:
    """Exactly round_half_up(f1*m) rows from a1 and the rest from a0"""
    m1 = round_half_up(as_fraction(f1) * m)
    m0 = m - m1
    if m1 < 1 or m0 < 1:
        raise SamplingError(f"split f1={f1} at m={m} leaves m1={m1}, m0={m0}; both must be >= 1",
                            stratum='a1' if m1 < 1 else 'a0', shortfall=1)
    rng = np.random.default_rng(seed)
    idx_a1 = _draw(rng, pool.group_indices(A1), m1, GROUP_NAMES[A1])
    idx_a0 = _draw(rng, pool.group_indices(A0), m0, GROUP_NAMES[A0])
    return pool.take(np.concatenate([idx_a1, idx_a0]), f"ratio m={m} f1={f1} seed={seed}")


def growing_group_series(pool: Dataset, fixed_group: int, fixed_n: int, growing_sizes: Sequence[int],
                         selective_positive_only: bool, seed: int) -> List[Dataset]:
    """Fixed-group sample drawn once, growing-group rows nested across sizes.

    Each dataset in the series extends the previous one, which models
    cumulative data collection. In selective mode the growing group only
    contributes positive-outcome rows.
    """
    growing_group = A1 if fixed_group == A0 else A0
    rng = np.random.default_rng(seed)
    fixed_idx = _draw(rng, pool.group_indices(fixed_group), fixed_n, GROUP_NAMES[fixed_group])
    if selective_positive_only:
        candidates = pool.cell_indices(growing_group, 1)
        stratum = f"{GROUP_NAMES[growing_group]} (Y=1)"
    else:
        candidates = pool.group_indices(growing_group)
        stratum = GROUP_NAMES[growing_group]
    order = _draw(rng, candidates, max(growing_sizes), stratum)

    mode = 'selective' if selective_positive_only else 'random'
    return [
        pool.take(np.concatenate([fixed_idx, order[:size]]),
                  f"growing {GROUP_NAMES[growing_group]}={size} fixed {GROUP_NAMES[fixed_group]}={fixed_n} "
                  f"{mode} seed={seed}")
        for size in growing_sizes
    ]


def draw_family(pool: Dataset, protocol: Protocol, sweep_index: int = 0) -> SampleFamily:
    """Replicate j uses derive_seed(master_seed, sweep_index, j)"""
    kind = protocol.kind
    seeds = [derive_seed(protocol.master_seed, sweep_index, j) for j in range(protocol.repeats)]
    if isinstance(kind, Sized):
        replicates = [sample_sized(pool, kind.m, s) for s in seeds]
    elif isinstance(kind, Ratio):
        replicates = [sample_ratio(pool, kind.m, kind.f1, s) for s in seeds]
    else:
        raise ValidationError("growing-group protocols produce one family per size, use draw_growing_families")
    return SampleFamily(protocol=protocol, replicates=tuple(replicates))


def draw_growing_families(pool: Dataset, protocol: Protocol) -> List[SampleFamily]:
    """One family per growing size; replicate j of every family comes from the same nested series"""
    kind = protocol.kind
    if not isinstance(kind, GrowingGroup):
        raise ValidationError("draw_growing_families needs a GrowingGroup protocol")
    series = [
        growing_group_series(pool, kind.fixed_group, kind.fixed_n, kind.growing_sizes,
                             kind.selective_positive_only, derive_seed(protocol.master_seed, 0, j))
        for j in range(protocol.repeats)
    ]
    return [
        SampleFamily(protocol=protocol, replicates=tuple(run[i] for run in series))
        for i in range(len(kind.growing_sizes))
    ]
