"""Sampling package"""
from .determinism import derive_seed, round_half_up
from .samplers import (
    DEFAULT_REPEATS,
    GrowingGroup,
    Protocol,
    Ratio,
    SampleFamily,
    Sized,
    draw_family,
    draw_growing_families,
    growing_group_series,
    sample_ratio,
    sample_sized,
)

__all__ = [
    'derive_seed',
    'round_half_up',
    'DEFAULT_REPEATS',
    'GrowingGroup',
    'Protocol',
    'Ratio',
    'SampleFamily',
    'Sized',
    'draw_family',
    'draw_growing_families',
    'growing_group_series',
    'sample_ratio',
    'sample_sized',
]
