"""Exact minimum-support ternary certificates.

``min ||w||_0`` subject to ``f_i (H_n w)_i >= 1`` with ``w`` ternary, solved by
iterative deepening on the support size.  Each level is an exhaustive
branch-and-bound over ranked candidate characters (largest ``|fhat(S)|``
first, preferred sign ``sign(fhat(S))``), so the first feasible level is the
optimum.  Even levels are searched like odd ones.
"""

from __future__ import annotations

import logging
import math
import time
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import _kernels
from .boolean_core import TruthTable, butterfly, hadamard_matrix
from .synthesis import SynthesisFailed, TernaryMask, multi_start_repair, verify

log = logging.getLogger(__name__)

NODE_CHUNK = 2_000_000


class BudgetExhausted(RuntimeError):
    def __init__(self, fid: int, n: int, incumbent: Certificate | None, lower_bound: int):
        super().__init__(f"budget exhausted for fid {fid:#x} (n={n}); optimum >= {lower_bound}")
        self.fid = fid
        self.n = n
        self.incumbent = incumbent
        self.lower_bound = lower_bound


class InfeasibleAnomaly(RuntimeError):
    """No ternary mask of any support exists (impossible for n <= 4)."""


class ParityContradiction(AssertionError):
    pass


@dataclass(frozen=True)
class Budget:
    nodes: int | None = None
    seconds: float | None = None

    @classmethod
    def default_for(cls, n: int) -> Budget:
        return cls(nodes=10**8, seconds=30.0) if n >= 5 else cls()


@dataclass(frozen=True, eq=False)
class Certificate:
    fid: int
    n: int
    mask: TernaryMask
    min_support: int
    margin_min: int
    optimal: bool
    solver: str
    elapsed: float = 0.0
    nodes: int = 0

    def __eq__(self, other):
        if not isinstance(other, Certificate):
            return NotImplemented
        return (self.fid, self.n, self.mask, self.min_support, self.margin_min,
                self.optimal, self.solver) == (other.fid, other.n, other.mask, other.min_support,
                                               other.margin_min, other.optimal, other.solver)

    @property
    def truth_table(self) -> TruthTable:
        return TruthTable.from_fid(self.fid, self.n)

    def margin_vector(self) -> np.ndarray:
        return verify(self.mask, self.truth_table).margin_vector


@dataclass
class _Ranked:
    cols: np.ndarray
    posmask: np.ndarray
    negmask: np.ndarray
    prefix: np.ndarray
    order: np.ndarray
    sign: np.ndarray


def _rank_candidates(f: TruthTable) -> _Ranked:
    n, N = f.n, f.N
    H = hadamard_matrix(n)
    A = f.values.astype(np.int64)[:, None] * H
    delta = A.sum(axis=0)
    order = np.lexsort((np.arange(N), -np.abs(delta)))
    sign = np.where(delta[order] >= 0, 1, -1)
    cols = (A[:, order].T * sign[:, None]).astype(np.int8)
    weights = np.uint64(1) << np.arange(N, dtype=np.uint64)
    posmask = ((cols > 0).astype(np.uint64) * weights).sum(axis=1, dtype=np.uint64)
    negmask = ((cols < 0).astype(np.uint64) * weights).sum(axis=1, dtype=np.uint64)
    prefix = np.concatenate([[0], np.cumsum(np.abs(delta[order]))]).astype(np.int64)
    return _Ranked(np.ascontiguousarray(cols), posmask, negmask, prefix, order, sign)


class SolverBackend:
    """Contract for minimum-support solvers: ``solve(f, budget) -> Certificate``."""

    label = "abstract"
    exact = False
    anytime = False

    def solve(self, f: TruthTable, budget: Budget | None = None) -> Certificate:
        raise NotImplementedError


class BranchAndBoundBackend(SolverBackend):
    label = "bnb-v1"
    exact = True
    anytime = False

    def solve(self, f: TruthTable, budget: Budget | None = None) -> Certificate:
        if f.n > 5:
            raise ValueError("minimum-support search supports n <= 5")
        budget = budget or Budget.default_for(f.n)
        start = time.perf_counter()
        rk = _rank_candidates(f)
        N = f.N
        M = N
        y = np.zeros(N, np.int32)
        opt = np.zeros(M + 1, np.int8)
        tight = np.zeros(M + 1, np.uint64)
        chosen = np.zeros(M + 1, np.int8)
        nodes_total = 0
        for k in range(1, N + 1):
            state = np.array([-1, 0, 0, 0], np.int64)
            while True:
                chunk = NODE_CHUNK
                if budget.nodes is not None:
                    chunk = min(chunk, budget.nodes - nodes_total - int(state[3]))
                status = _kernels.PAUSED
                if chunk > 0:
                    status = _kernels.search_level(rk.cols, rk.posmask, rk.negmask, rk.prefix, k,
                                                   chunk, y, opt, tight, chosen, state)
                if status != _kernels.PAUSED:
                    break
                spent = time.perf_counter() - start
                over_nodes = budget.nodes is not None and nodes_total + state[3] >= budget.nodes
                over_time = budget.seconds is not None and spent >= budget.seconds
                if over_nodes or over_time:
                    raise BudgetExhausted(f.fid, f.n, _incumbent(f, self.label), k)
            nodes_total += int(state[3])
            if status == _kernels.FOUND:
                w = np.zeros(N, np.int8)
                w[rk.order] = rk.sign * chosen[:M]
                mask = TernaryMask(f.n, w)
                check = verify(mask, f)
                if not check.ok or mask.support != k:
                    raise AssertionError(f"search returned an invalid mask for fid {f.fid:#x}")
                if k % 2 == 0:
                    log.warning("even optimal support %d for fid %#x (n=%d)", k, f.fid, f.n)
                return Certificate(f.fid, f.n, mask, k, check.margin, True, self.label,
                                   time.perf_counter() - start, nodes_total)
        raise InfeasibleAnomaly(f"no ternary mask represents fid {f.fid:#x} (n={f.n})")


def _incumbent(f: TruthTable, label: str) -> Certificate | None:
    try:
        res = multi_start_repair(f)
    except SynthesisFailed:
        return None
    m = verify(res.mask, f)
    return Certificate(f.fid, f.n, res.mask, res.mask.support, m.margin, False, label)


BUILTIN = BranchAndBoundBackend()


def min_support_exact(f: TruthTable, budget: Budget | None = None,
                      backend: SolverBackend | None = None) -> Certificate:
    return (backend or BUILTIN).solve(f, budget)


def enumerate_min_support(n: int, max_support: int | None = None) -> np.ndarray:
    """Forward enumeration oracle: minimum support of every fid (n <= 4).

    Walks every ternary mask with at most ``max_support`` nonzeros in
    increasing support order and records the first support that realises each
    truth table.  Entries never reached are -1.
    """
    if n > 4:
        raise ValueError("forward enumeration is only feasible for n <= 4")
    N = 1 << n
    max_support = N if max_support is None else max_support
    H = hadamard_matrix(n)
    best = np.full(1 << N, -1, dtype=np.int64)
    weights = np.int64(1) << np.arange(N, dtype=np.int64)
    for k in range(1, max_support + 1):
        signs = 1 - 2 * ((np.arange(1 << k)[:, None] >> np.arange(k)[None, :]) & 1)
        for sets in _chunked(combinations(range(N), k), max(1, 200_000 // (1 << k))):
            S = np.array(sets, dtype=np.int64)
            # y[c, s, i] = sum_m signs[s, m] * H[i, S[c, m]]
            y = np.einsum("sm,cim->csi", signs, H[:, S].transpose(1, 0, 2), optimize=True)
            y = y.reshape(-1, N)
            y = y[np.all(y != 0, axis=1)]
            fids = ((y < 0) * weights).sum(axis=1)
            hit = best[fids] < 0
            best[fids[hit]] = k
    return best


def _chunked(it, size):
    buf = []
    for item in it:
        buf.append(item)
        if len(buf) == size:
            yield buf
            buf = []
    if buf:
        yield buf


@dataclass
class SupportCensus:
    n: int
    histogram: dict[int, int]
    exhausted: list[int] = field(default_factory=list)
    certificates: list[Certificate] = field(default_factory=list)

    @property
    def solved(self) -> int:
        return sum(self.histogram.values())

    @property
    def mean(self) -> float:
        return sum(k * c for k, c in self.histogram.items()) / self.solved

    @property
    def median(self) -> float:
        vals = sorted(c.min_support for c in self.certificates)
        return float(np.median(vals))

    @property
    def max(self) -> int:
        return max(self.histogram)

    @property
    def all_odd(self) -> bool:
        return all(k % 2 == 1 for k in self.histogram)

    def fractions(self) -> dict[int, float]:
        return {k: c / self.solved for k, c in sorted(self.histogram.items())}

    def csv(self) -> str:
        lines = ["support,count,fraction"]
        for k, c in sorted(self.histogram.items()):
            lines.append(f"{k},{c},{c / self.solved:.6f}")
        return "\n".join(lines) + "\n"


def support_census(n: int, fids=None, budget: Budget | None = None,
                   backend: SolverBackend | None = None, progress=None) -> SupportCensus:
    """Solve every fid (default: the whole universe, n <= 4) and tally optimal supports."""
    if fids is None:
        if n > 4:
            raise ValueError("full census only for n <= 4; pass a sample of fids")
        fids = range(1 << (1 << n))
    hist: Counter = Counter()
    census = SupportCensus(n, {})
    for idx, fid in enumerate(sorted(set(int(x) for x in fids))):
        try:
            cert = min_support_exact(TruthTable.from_fid(fid, n), budget, backend)
        except BudgetExhausted:
            census.exhausted.append(fid)
            continue
        hist[cert.min_support] += 1
        census.certificates.append(cert)
        if progress is not None:
            progress(idx + 1)
    census.histogram = dict(sorted(hist.items()))
    return census


@dataclass
class ParityReport:
    checked: int
    odd_support: int
    even_support_fids: list[int]

    @property
    def all_odd(self) -> bool:
        return not self.even_support_fids


def parity_audit(certs) -> ParityReport:
    """Hard check: every margin entry has the parity of the support.

    Soft tally: how many optimal supports are odd (even ones are logged).
    """
    checked = odd = 0
    even = []
    for cert in certs:
        mv = cert.margin_vector()
        if np.any((mv - cert.mask.support) % 2):
            raise ParityContradiction(f"margin parity mismatch for fid {cert.fid:#x}")
        checked += 1
        if cert.min_support % 2:
            odd += 1
        else:
            even.append(cert.fid)
            log.warning("even minimum support %d at fid %#x", cert.min_support, cert.fid)
    return ParityReport(checked, odd, even)
