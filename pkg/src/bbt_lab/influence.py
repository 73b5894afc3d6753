"""Exact coordinate influences and influence-distribution summaries."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .boolean_core import IntegerSpectrum, popcount_table


@dataclass(frozen=True)
class InfluenceVector:
    """Influences stored as integer numerators over ``4**n``."""

    n: int
    numerators: tuple[int, ...]

    def __post_init__(self):
        if len(self.numerators) != self.n:
            raise ValueError("one numerator per coordinate")
        cap = 4 ** self.n
        for a in self.numerators:
            if not 0 <= a <= cap:
                raise ValueError(f"influence numerator {a} outside [0, {cap}]")

    @property
    def denominator(self) -> int:
        return 4 ** self.n

    @property
    def total_numerator(self) -> int:
        return sum(self.numerators)

    @property
    def values(self) -> tuple[Fraction, ...]:
        d = self.denominator
        return tuple(Fraction(a, d) for a in self.numerators)

    @property
    def total(self) -> Fraction:
        return Fraction(self.total_numerator, self.denominator)


def influence_numerators(coeffs: np.ndarray, n: int) -> np.ndarray:
    """Batch influence numerators: ``a[..., l] = sum_{S contains l} coeffs[..., S]**2``."""
    sq = np.asarray(coeffs, dtype=np.int64) ** 2
    S = np.arange(1 << n)
    member = ((S[:, None] >> np.arange(n)[None, :]) & 1).astype(np.int64)
    return sq @ member


def total_influence_numerators(coeffs: np.ndarray, n: int) -> np.ndarray:
    sq = np.asarray(coeffs, dtype=np.int64) ** 2
    return sq @ popcount_table(1 << n)


def influences(s: IntegerSpectrum) -> InfluenceVector:
    nums = influence_numerators(s.coeffs, s.n)
    return InfluenceVector(s.n, tuple(int(a) for a in nums))


def influence_entropy(v: InfluenceVector) -> float:
    """Base-2 Shannon entropy of ``Inf_l / I``; zero for constant functions."""
    total = v.total_numerator
    if total == 0:
        return 0.0
    h = 0.0
    for a in v.numerators:
        if a:
            p = a / total
            h -= p * math.log2(p)
    return h


def max_influence(v: InfluenceVector) -> Fraction:
    return Fraction(max(v.numerators), v.denominator)
