"""Ternary Walsh-threshold masks: heuristic thresholding, greedy repair,
multi-start repair and sorted Fourier rounding, plus exact verification."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .boolean_core import IntegerSpectrum, TruthTable, apply_hadamard, fwht, hadamard_matrix

DEFAULT_TAU = 0.05
RESTART_TAUS = (0.01, 0.1, 0.2, 0.3)
DEFAULT_MAX_ITER = 200
MAX_PLATEAU = 8


class RepairExhausted(RuntimeError):
    def __init__(self, mask: TernaryMask, iterations: int):
        super().__init__(f"greedy repair stopped after {iterations} iterations with violations left")
        self.mask = mask
        self.iterations = iterations


class SynthesisFailed(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class TernaryMask:
    n: int
    w: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w)
        if w.shape != (1 << self.n,):
            raise ValueError(f"mask must have length {1 << self.n}")
        if not np.all(np.isin(w, (-1, 0, 1))):
            raise ValueError("mask entries must be -1, 0 or +1")
        w = w.astype(np.int8)
        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    @property
    def support(self) -> int:
        return int(np.count_nonzero(self.w))

    def __eq__(self, other):
        if not isinstance(other, TernaryMask):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.w, other.w)

    def __hash__(self):
        return hash((self.n, self.w.tobytes()))

    def tolist(self) -> list[int]:
        return [int(x) for x in self.w]


@dataclass(frozen=True)
class Verification:
    ok: bool
    margin: int
    margin_vector: np.ndarray


def verify(mask: TernaryMask, f: TruthTable) -> Verification:
    """Exact sign check ``f_i * (H_n w)_i >= 1`` for every input row."""
    if mask.n != f.n:
        raise ValueError("mask and truth table disagree on n")
    mv = f.values.astype(np.int64) * apply_hadamard(mask.w)
    margin = int(mv.min())
    return Verification(margin >= 1, margin, mv)


@dataclass(frozen=True)
class SynthesisResult:
    mask: TernaryMask | None
    status: str  # heuristic_ok | repaired | rounded | failed
    iterations: int
    strategy: str

    def record(self, f: TruthTable) -> dict:
        rec = {"fid": f"{f.fid:#x}", "n": f.n, "status": self.status, "strategy": self.strategy}
        if self.mask is None:
            rec.update(support=None, margin=None)
        else:
            rec.update(support=self.mask.support, margin=verify(self.mask, f).margin)
        return rec


def heuristic_mask(s: IntegerSpectrum, tau: float = DEFAULT_TAU) -> TernaryMask:
    """Keep the sign of every Fourier coefficient whose magnitude exceeds ``tau``."""
    if not tau > 0:
        raise ValueError("tau must be positive")
    c = s.coeffs
    keep = np.abs(c) > tau * (1 << s.n)
    return TernaryMask(s.n, np.where(keep, np.sign(c), 0))


@lru_cache(maxsize=8)
def _hadamard(n: int) -> np.ndarray:
    H = hadamard_matrix(n)
    H.setflags(write=False)
    return H


def greedy_repair(w0: TernaryMask, f: TruthTable, max_iter: int = DEFAULT_MAX_ITER) -> SynthesisResult:
    """Single-coordinate repair driven by the violation gradient.

    Each step moves one coordinate by ``sign(delta_S)`` (clipped to ternary),
    choosing the largest ``|delta_S|`` among moves that shrink the violation
    set; ties go to the smallest ``S``.  When no move shrinks it, the best move
    that keeps its size is taken, at most ``MAX_PLATEAU`` times in a row.
    """
    if w0.n != f.n:
        raise ValueError("mask and truth table disagree on n")
    H = _hadamard(f.n)
    fv = f.values.astype(np.int64)
    FH = fv[:, None] * H
    w = w0.w.astype(np.int64)
    margins = FH @ w
    plateau = 0
    for it in range(max_iter + 1):
        viol = margins <= 0
        nv = int(viol.sum())
        if nv == 0:
            return SynthesisResult(TernaryMask(f.n, w), "repaired", it, "greedy")
        if it == max_iter:
            break
        delta = FH[viol].sum(axis=0)
        change = np.clip(w + np.sign(delta), -1, 1) - w
        movable = change != 0
        if not movable.any():
            break
        counts = ((margins[:, None] + FH * change[None, :]) <= 0).sum(axis=0)
        score = np.abs(delta)
        better = movable & (counts < nv)
        if better.any():
            plateau = 0
            pick = int(np.argmax(np.where(better, score, -1)))
        else:
            level = movable & (counts == nv)
            if not level.any() or plateau >= MAX_PLATEAU:
                break
            plateau += 1
            pick = int(np.argmax(np.where(level, score, -1)))
        w[pick] += change[pick]
        margins += FH[:, pick] * change[pick]
    raise RepairExhausted(TernaryMask(f.n, w), it)


def fourier_rounding_gradient(f: TruthTable) -> np.ndarray:
    """Full violation gradient ``delta = f^T H`` (all rows violated), by dense product."""
    return f.values.astype(np.int64) @ _hadamard(f.n)


def fourier_rounding(f: TruthTable, delta: np.ndarray | None = None) -> SynthesisResult | None:
    """Top-k signed coefficients by ``|delta|`` for k = 1..N; first verifying k wins."""
    if delta is None:
        delta = fourier_rounding_gradient(f)
    N = f.N
    order = np.lexsort((np.arange(N), -np.abs(delta)))
    w = np.zeros(N, dtype=np.int8)
    fv = f.values.astype(np.int64)
    H = _hadamard(f.n)
    y = np.zeros(N, dtype=np.int64)
    for k, S in enumerate(order, start=1):
        sgn = int(np.sign(delta[S]))
        if sgn:
            w[S] = sgn
            y += sgn * H[:, S]
        if np.all(fv * y >= 1):
            return SynthesisResult(TernaryMask(f.n, w), "rounded", k, f"strategy3:k={k}")
    return None


def multi_start_repair(f: TruthTable, tau: float = DEFAULT_TAU, taus=RESTART_TAUS,
                       max_iter: int = DEFAULT_MAX_ITER) -> SynthesisResult:
    """Heuristic + repair, then repair from other thresholds, then Fourier rounding."""
    spec = fwht(f)
    w0 = heuristic_mask(spec, tau)
    if verify(w0, f).ok:
        return SynthesisResult(w0, "heuristic_ok", 0, "strategy1:heuristic")
    starts = [(w0, f"strategy1:tau={tau:g}")]
    starts += [(heuristic_mask(spec, t), f"strategy2:tau={t:g}") for t in taus]
    for start, label in starts:
        try:
            res = greedy_repair(start, f, max_iter)
        except RepairExhausted:
            continue
        return SynthesisResult(res.mask, "repaired", res.iterations, label)
    res = fourier_rounding(f, spec.coeffs)
    if res is not None:
        return res
    raise SynthesisFailed(f"no strategy produced a mask for fid {f.fid:#x}")


def synthesize(f: TruthTable, heuristic_only: bool = False, tau: float = DEFAULT_TAU) -> SynthesisResult:
    """Batch-friendly wrapper: never raises, reports ``failed`` instead."""
    if heuristic_only:
        w = heuristic_mask(fwht(f), tau)
        if verify(w, f).ok:
            return SynthesisResult(w, "heuristic_ok", 0, "strategy1:heuristic")
        return SynthesisResult(None, "failed", 0, "strategy1:heuristic")
    try:
        return multi_start_repair(f, tau)
    except SynthesisFailed:
        return SynthesisResult(None, "failed", 0, "none")


def heuristic_success_count(n: int, tau: float = DEFAULT_TAU) -> int:
    """Vectorised count of functions whose heuristic mask verifies (n <= 4)."""
    from .boolean_core import all_truth_tables, butterfly

    T = all_truth_tables(n).astype(np.int64)
    C = butterfly(T)
    W = np.where(np.abs(C) > tau * (1 << n), np.sign(C), 0)
    Y = butterfly(W)
    return int(np.all(T * Y >= 1, axis=1).sum())


def dumps_records(records) -> str:
    return "".join(json.dumps(r, separators=(",", ":")) + "\n" for r in records)
