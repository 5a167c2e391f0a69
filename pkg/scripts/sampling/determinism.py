"""Seed derivation and exact rounding shared by every randomized protocol.

derive_seed(master, sweep_index, replicate_index) chains three rounds of the
SplitMix64 finalizer over 64-bit words (all arithmetic mod 2**64):

    mix(x):  x = x + 0x9E3779B97F4A7C15
             x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9
             x = (x ^ (x >> 27)) * 0x94D049BB133111EB
             return x ^ (x >> 31)

    h = mix(master)
    h = mix(h ^ sweep_index)
    h = mix(h ^ replicate_index)
    seed = h >> 1                      # 63-bit, nonnegative

Negative inputs are reduced mod 2**64 first. Pure integer arithmetic, so the
value is identical on every platform.
"""
from fractions import Fraction
import math

MASK64 = (1 << 64) - 1

# Reserved sweep indices for draws that are not part of a sweep
HOLDOUT_STREAM = MASK64
IMPORTANCE_STREAM = MASK64 - 1
LEARNER_STREAM = MASK64 - 2
CV_STREAM = MASK64 - 3


def _mix(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def derive_seed(master_seed: int, sweep_index: int, replicate_index: int) -> int:
    h = _mix(master_seed & MASK64)
    h = _mix(h ^ (sweep_index & MASK64))
    h = _mix(h ^ (replicate_index & MASK64))
    return h >> 1


def as_fraction(value) -> Fraction:
    """Exact rational for a user-supplied fraction (0.1 means 1/10, not its binary float)"""
    if isinstance(value, Fraction):
        return value
    return Fraction(value).limit_denominator(10 ** 9)


def round_half_up(value) -> int:
    """Round to nearest integer, ties go up (2.5 -> 3)"""
    return math.floor(as_fraction(value) + Fraction(1, 2))
