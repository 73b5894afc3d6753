"""Banach-butterfly exponents, the contraction invariant and its bound suite.

For influences ``x_l`` the contraction invariant is
``mu = prod_l 2 ** (-x_l / (1 + x_l))``.  Everything except ``mu_float`` and
the numeric operator-norm checks is exact rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .influence import InfluenceVector


class DomainError(ValueError):
    pass


class BoundViolation(AssertionError):
    pass


class UnequalSums(ValueError):
    pass


@dataclass(frozen=True)
class ContractionProfile:
    n: int
    exponents: tuple[Fraction, ...]
    log2_mu: Fraction
    algebraic_degree: int

    @property
    def mu_float(self) -> float:
        return 2.0 ** float(self.log2_mu)


def phi(x: Fraction) -> Fraction:
    return x / (1 + x)


@lru_cache(maxsize=1 << 16)
def _log2_mu_from_sorted(nums: tuple[int, ...], den: int) -> Fraction:
    return -sum((Fraction(a, a + den) for a in nums), Fraction(0))


def log2_mu(v: InfluenceVector) -> Fraction:
    # inf/(1+inf) = a/(a+4^n) for numerator a; the sum is symmetric so cache on sorted input
    return _log2_mu_from_sorted(tuple(sorted(v.numerators)), v.denominator)


def contraction_profile(v: InfluenceVector) -> ContractionProfile:
    exps = tuple(1 + x for x in v.values)
    r = log2_mu(v)
    prof = ContractionProfile(v.n, exps, r, r.denominator)
    _check_profile_invariants(prof, v)
    return prof


def _check_profile_invariants(prof: ContractionProfile, v: InfluenceVector) -> None:
    if any(not 1 <= p <= 2 for p in prof.exponents):
        raise BoundViolation("exponent outside [1, 2]")
    if not Fraction(-v.n, 2) <= prof.log2_mu <= 0:
        raise BoundViolation(f"log2 mu = {prof.log2_mu} outside [-n/2, 0]")


def butterfly_opnorm(p) -> float:
    """``||A||_{p->p}`` for the 2x2 butterfly ``A = [[1, 1], [1, -1]]``."""
    if p == math.inf:
        return 2.0
    if p < 1:
        raise DomainError(f"operator norm needs p >= 1, got {p}")
    inv = 1.0 / float(p)
    return max(2.0 ** inv, 2.0 ** (1.0 - inv))


def known_maximizer(p) -> np.ndarray:
    """Unit-norm vector attaining the butterfly norm."""
    if p != math.inf and p <= 2:
        return np.array([1.0, 0.0])
    scale = 1.0 if p == math.inf else 2.0 ** (-1.0 / float(p))
    return np.array([scale, scale])


def _lp(v: np.ndarray, p) -> np.ndarray:
    if p == math.inf:
        return np.max(np.abs(v), axis=-1)
    return np.sum(np.abs(v) ** p, axis=-1) ** (1.0 / p)


@dataclass
class OpnormReport:
    p: float
    bound: float
    sampled_max: float
    maximizer_value: float
    bound_respected: bool
    maximizer_attains: bool
    clarkson_samples: int
    clarkson_ok: bool

    @property
    def ok(self) -> bool:
        return self.bound_respected and self.maximizer_attains and self.clarkson_ok


def clarkson_holds(a: np.ndarray, b: np.ndarray, p: float, rtol: float = 1e-12) -> bool:
    """Check the Clarkson inequality appropriate for ``p`` on paired samples."""
    lhs = np.abs(a + b) ** p + np.abs(a - b) ** p
    rhs = 2.0 * (np.abs(a) ** p + np.abs(b) ** p)
    slack = rtol * np.maximum(lhs, rhs) + 1e-300
    ok = True
    if p <= 2:
        ok &= bool(np.all(lhs <= rhs + slack))
    if p >= 2:
        ok &= bool(np.all(lhs >= rhs - slack))
    return ok


def verify_opnorm_numeric(p, trials: int = 10_000, seed: int = 0,
                          clarkson_trials: int | None = None) -> OpnormReport:
    """Random-search the ratio ``||Av||_p / ||v||_p`` and compare with the closed form."""
    if p != math.inf and not 1 <= p <= 64:
        raise DomainError("numeric check supports p in [1, 64] or inf")
    rng = np.random.default_rng(seed)
    pf = math.inf if p == math.inf else float(p)
    bound = butterfly_opnorm(p)
    v = rng.standard_normal((trials, 2))
    # mix in near-axis and near-diagonal directions where the maximum lives
    v[: trials // 4, 1] *= 1e-3
    v[trials // 4: trials // 2, 1] = v[trials // 4: trials // 2, 0] * (1 + 1e-3 * rng.standard_normal(trials // 2 - trials // 4))
    Av = np.stack([v[:, 0] + v[:, 1], v[:, 0] - v[:, 1]], axis=1)
    ratios = _lp(Av, pf) / _lp(v, pf)
    m = known_maximizer(p)
    Am = np.array([m[0] + m[1], m[0] - m[1]])
    attained = float(_lp(Am, pf) / _lp(m, pf))
    ct = trials if clarkson_trials is None else clarkson_trials
    ab = rng.standard_normal((ct, 2)) * rng.choice([1e-3, 1.0, 1e3], size=(ct, 1))
    if pf == math.inf:
        cl_ok = True
    else:
        cl_ok = clarkson_holds(ab[:, 0], ab[:, 1], pf)
    return OpnormReport(
        p=pf,
        bound=bound,
        sampled_max=float(ratios.max()),
        maximizer_value=attained,
        bound_respected=bool(ratios.max() <= bound + 1e-9),
        maximizer_attains=abs(attained - bound) <= 1e-12,
        clarkson_samples=ct,
        clarkson_ok=cl_ok,
    )


@dataclass(frozen=True)
class BoundSlack:
    coarse_lower: Fraction   # r - (-I)
    coarse_upper: Fraction   # -I/2 - r
    jensen: Fraction         # r - (-I / (1 + I/n))


def check_bounds(profile: ContractionProfile, v: InfluenceVector) -> BoundSlack:
    """Coarse and Jensen bounds on ``log2 mu`` as exact slacks (all must be >= 0)."""
    I = v.total
    r = profile.log2_mu
    n = v.n
    slack = BoundSlack(
        coarse_lower=r + I,
        coarse_upper=-I / 2 - r,
        jensen=r + I / (1 + I / n),
    )
    for name in ("coarse_lower", "coarse_upper", "jensen"):
        if getattr(slack, name) < 0:
            raise BoundViolation(f"{name} bound violated: slack {getattr(slack, name)}")
    return slack


def _as_fractions(x: Sequence) -> list[Fraction]:
    return [Fraction(e) for e in x]


def majorizes(x: Sequence, y: Sequence) -> bool:
    """Weak check ``x >- y``: descending prefix sums of x dominate, totals equal."""
    xs = sorted(_as_fractions(x), reverse=True)
    ys = sorted(_as_fractions(y), reverse=True)
    if len(xs) != len(ys):
        raise ValueError("vectors must have equal length")
    if sum(xs) != sum(ys):
        return False
    px = py = Fraction(0)
    for a, b in zip(xs, ys):
        px += a
        py += b
        if px < py:
            return False
    return True


def schur_sum(x: Sequence) -> Fraction:
    """``Phi(x) = sum x_l / (1 + x_l)`` so that ``log2 mu = -Phi``."""
    return sum((phi(e) for e in _as_fractions(x)), Fraction(0))


@dataclass(frozen=True)
class SchurVerdict:
    majorizes: bool
    permutation: bool
    phi_x: Fraction
    phi_y: Fraction

    @property
    def mu_larger_for_x(self) -> bool:
        return self.phi_x < self.phi_y


def schur_compare(x: Sequence, y: Sequence) -> SchurVerdict:
    xs, ys = _as_fractions(x), _as_fractions(y)
    if sum(xs) != sum(ys):
        raise UnequalSums(f"sums differ: {sum(xs)} vs {sum(ys)}")
    maj = majorizes(xs, ys)
    perm = sorted(xs) == sorted(ys)
    verdict = SchurVerdict(maj, perm, schur_sum(xs), schur_sum(ys))
    if perm and verdict.phi_x != verdict.phi_y:
        raise BoundViolation("Phi not symmetric")
    if maj and not perm and not verdict.phi_x < verdict.phi_y:
        raise BoundViolation(f"strict Schur-concavity violated for {xs} vs {ys}")
    return verdict


def layer_butterfly(v: np.ndarray, layer: int) -> np.ndarray:
    """Apply the block-diagonal butterfly ``B_layer`` (pairs ``i, i ^ 2**layer``)."""
    v = np.asarray(v, dtype=np.float64)
    N = v.shape[-1]
    h = 1 << layer
    blocks = v.reshape(*v.shape[:-1], N // (2 * h), 2, h)
    a, b = blocks[..., 0, :], blocks[..., 1, :]
    return np.stack([a + b, a - b], axis=-2).reshape(v.shape)


@dataclass
class NormPropagationReport:
    influence: Fraction
    p: float
    factor: float
    max_ratio: float
    ok: bool


def norm_propagation_check(infl, n: int = 4, trials: int = 1000, seed: int = 0,
                           v: np.ndarray | None = None) -> NormPropagationReport:
    """Check ``||B^-1 v||_p <= 2**(-infl/(1+infl)) ||v||_p`` with ``p = 1 + infl``."""
    infl = Fraction(infl)
    if not 0 <= infl <= 1:
        raise DomainError("influence must be in [0, 1]")
    p = float(1 + infl)
    factor = 2.0 ** (-float(phi(infl)))
    rng = np.random.default_rng(seed)
    N = 1 << n
    if v is None:
        v = rng.standard_normal((trials, N))
        v[: trials // 3, N // 2:] = 0.0
    v = np.atleast_2d(np.asarray(v, dtype=np.float64))
    worst = 0.0
    for layer in range(n):
        out = layer_butterfly(v, layer) / 2.0
        ratios = _lp(out, p) / _lp(v, p)
        worst = max(worst, float(ratios.max()))
    return NormPropagationReport(infl, p, factor, worst, worst <= factor + 1e-9)
