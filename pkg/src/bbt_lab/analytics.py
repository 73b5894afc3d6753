"""Exhaustive censuses, samplers and correlation tables against minimum support."""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy import stats

from .boolean_core import all_truth_tables, butterfly, fids_to_tables, format_fid
from .cancellation import layer_cancellation_batch
from .influence import influence_numerators
from .invariant import _log2_mu_from_sorted

BIN_WIDTH = Fraction(1, 20)
LOW_POWER = 50
P_FLOOR = 1e-300
DIAGNOSTICS = ("I", "mu", "log2_mu", "H_inf", "max_inf", "cancellation")
P_VALUE_METHOD = ("pearson: two-sided t-test with n-2 dof; "
                  "spearman: average ranks for ties, two-sided t-approximation")


class InsufficientVariance(ValueError):
    """A correlation was requested on a constant column."""


class UniverseMissing(FileNotFoundError):
    pass


# ---------------------------------------------------------------------------
# per-function exact summaries


@dataclass
class UniverseProfiles:
    """Exact influence data for a list of functions on ``n`` variables."""

    n: int
    fids: np.ndarray
    numerators: np.ndarray            # (F, n) influence numerators over 4^n
    log2_mu: list[Fraction]

    @property
    def denominator(self) -> int:
        return 4 ** self.n

    @property
    def total(self) -> list[Fraction]:
        d = self.denominator
        return [Fraction(int(a), d) for a in self.numerators.sum(axis=1)]


def profiles_for_tables(tables: np.ndarray, n: int, fids=None) -> UniverseProfiles:
    nums = influence_numerators(butterfly(np.asarray(tables, dtype=np.int64)), n)
    den = 4 ** n
    srt = np.sort(nums, axis=1)
    l2 = [_log2_mu_from_sorted(tuple(int(a) for a in row), den) for row in srt]
    if fids is None:
        fids = np.arange(len(tables), dtype=np.uint64)
    return UniverseProfiles(n, np.asarray(fids, dtype=np.uint64), nums, l2)


def universe_profiles(n: int) -> UniverseProfiles:
    """Every function on ``n <= 4`` variables, row index = fid."""
    return profiles_for_tables(all_truth_tables(n), n)


# ---------------------------------------------------------------------------
# separation and degree censuses


@dataclass
class CensusReport:
    n: int
    universe_size: int
    separation_pair_count: int
    pairs_by_total_influence: dict[Fraction, int]
    degree_histogram: dict[int, int]
    witness: tuple[int, int] | None = None
    witness_influences: tuple[tuple[Fraction, ...], tuple[Fraction, ...]] | None = None
    witness_log2_mu: tuple[Fraction, Fraction] | None = None

    def breakdown_csv(self) -> str:
        lines = ["total_influence,pairs"]
        for k, c in sorted(self.pairs_by_total_influence.items()):
            lines.append(f"{k},{c}")
        return "\n".join(lines) + "\n"


def _pairs(m: int) -> int:
    return m * (m - 1) // 2


def separation_census(n: int = 3) -> CensusReport:
    """Unordered pairs ``{f, g}`` with ``I(f) = I(g)`` but ``mu(f) != mu(g)``.

    Counted exactly over all ``2^(2^n)`` functions.  The count is broken down
    by total-influence level, and the witness is the lowest-fid separated pair
    at the lowest level where separation occurs.
    """
    prof = universe_profiles(n)
    levels: dict[int, list[int]] = defaultdict(list)
    for fid, tot in enumerate(prof.numerators.sum(axis=1)):
        levels[int(tot)].append(fid)
    den = prof.denominator
    by_level = {}
    witness = None
    for tot in sorted(levels):
        members = levels[tot]
        mus = Counter(prof.log2_mu[f] for f in members)
        sep = _pairs(len(members)) - sum(_pairs(c) for c in mus.values())
        if sep:
            by_level[Fraction(tot, den)] = sep
            if witness is None:
                f = members[0]
                g = next(h for h in members if prof.log2_mu[h] != prof.log2_mu[f])
                witness = (f, g)
    report = CensusReport(n, len(prof.fids), sum(by_level.values()), by_level,
                          _degree_counts(prof.log2_mu))
    if witness is not None:
        f, g = witness
        report.witness = witness
        report.witness_influences = tuple(
            tuple(Fraction(int(a), den) for a in prof.numerators[h]) for h in witness)
        report.witness_log2_mu = (prof.log2_mu[f], prof.log2_mu[g])
    return report


def _degree_counts(log2_mu) -> dict[int, int]:
    # mu = 2^(p/q) in lowest terms has algebraic degree q over the rationals
    return dict(sorted(Counter(x.denominator for x in log2_mu).items()))


def degree_histogram(n: int = 3) -> dict[int, int]:
    return _degree_counts(universe_profiles(n).log2_mu)


# ---------------------------------------------------------------------------
# sampling


def sampler(mode: str, n: int, size: int, seed: int, universe=None) -> list[int]:
    """Reproducible fid sample.

    ``uniform`` draws with replacement from ``[0, 2^(2^n))``.  ``npn_canonical``
    draws without replacement from the canonical representatives; ``universe``
    may be an :class:`~bbt_lab.npn.NpnUniverse` or a path to a saved one, and
    defaults to the file under the data directory.
    """
    from .certstore import data_dir
    from .npn import NpnUniverse

    rng = np.random.default_rng(seed)
    if mode == "uniform":
        N = 1 << n
        if N > 64:
            raise ValueError("uniform fid sampling supports n <= 6")
        hi = rng.integers(0, 1 << min(N, 32), size=size, dtype=np.uint64)
        if N <= 32:
            return [int(x) for x in hi]
        lo = rng.integers(0, 1 << 32, size=size, dtype=np.uint64)
        return [(int(h) << 32) | int(l) for h, l in zip(hi, lo)]
    if mode == "npn_canonical":
        if universe is None:
            universe = data_dir() / f"npn_n{n}.txt"
        if not isinstance(universe, NpnUniverse):
            path = Path(universe)
            if not path.exists():
                raise UniverseMissing(f"no NPN universe for n={n} at {path}; run the npn subcommand")
            universe = NpnUniverse.load(path)
        if universe.n != n:
            raise ValueError(f"universe is for n={universe.n}, requested n={n}")
        if size > universe.class_count:
            raise ValueError(f"cannot draw {size} distinct reps from {universe.class_count}")
        idx = rng.choice(universe.class_count, size=size, replace=False)
        return [int(universe.canonical_fids[i]) for i in idx]
    raise ValueError(f"unknown sampling mode {mode!r}")


def stratified_sample(n: int, size: int, seed: int) -> list[int]:
    """Sample without replacement, proportionally allocated over total-influence bins.

    Allocation uses largest remainders so the bin sizes are deterministic; the
    draw inside each bin is seeded.  Only for exhaustive universes (n <= 4).
    """
    prof = universe_profiles(n)
    keys = np.array([bin_key(t) for t in prof.total])
    bins = sorted(set(keys.tolist()))
    members = {b: np.flatnonzero(keys == b) for b in bins}
    total = len(keys)
    quota = {b: size * len(members[b]) / total for b in bins}
    alloc = {b: int(math.floor(q)) for b, q in quota.items()}
    short = size - sum(alloc.values())
    for b in sorted(bins, key=lambda b: (-(quota[b] - alloc[b]), b))[:short]:
        alloc[b] += 1
    rng = np.random.default_rng(seed)
    out = []
    for b in bins:
        if alloc[b]:
            out.extend(int(x) for x in rng.choice(members[b], size=alloc[b], replace=False))
    return sorted(out)


# ---------------------------------------------------------------------------
# correlations


def bin_key(total: Fraction, width: Fraction = BIN_WIDTH) -> Fraction:
    """Round to the nearest multiple of ``width``, halves rounding up."""
    return math.floor(total / width + Fraction(1, 2)) * width


def format_p(p: float | None):
    if p is None:
        return None
    if p < P_FLOOR:
        return "<1e-300"
    return float(p)


def _exact_ranks(values) -> np.ndarray:
    # order-preserving integer codes: Spearman on these equals Spearman on the exact values
    order = {v: i for i, v in enumerate(sorted(set(values)))}
    return np.array([order[v] for v in values], dtype=np.float64)


def _check_variance(x, y):
    if len(x) < 3 or np.ptp(x) == 0 or np.ptp(y) == 0:
        raise InsufficientVariance("constant column or fewer than 3 points")


def spearman(x, y) -> tuple[float, float]:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    _check_variance(x, y)
    res = stats.spearmanr(x, y)
    return float(res.statistic), float(res.pvalue)


def pearson(x, y) -> tuple[float, float]:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    _check_variance(x, y)
    res = stats.pearsonr(x, y)
    return float(res.statistic), float(res.pvalue)


@dataclass
class MarginalRow:
    diagnostic: str
    r: float | None
    p_r: float | str | None
    rho: float | None
    p_rho: float | str | None
    note: str = ""


@dataclass
class BinRow:
    key: Fraction
    size: int
    rho_mu: float | None
    p_mu: float | str | None
    rho_h: float | None
    p_h: float | str | None
    low_power: bool
    note: str = ""

    @property
    def label(self) -> str:
        return f"{float(self.key):.2f}"


@dataclass
class CorrelationReport:
    n: int
    mode: str
    size: int
    seed: int | None
    marginal: list[MarginalRow]
    conditional: list[BinRow]
    p_value_method: str = P_VALUE_METHOD
    extra: dict = field(default_factory=dict)

    def bin(self, key) -> BinRow | None:
        key = Fraction(key).limit_denominator(1000)
        for row in self.conditional:
            if row.key == key:
                return row
        return None

    def marginal_row(self, name: str) -> MarginalRow:
        return next(r for r in self.marginal if r.diagnostic == name)

    def marginal_csv(self) -> str:
        lines = ["diagnostic,r,p,rho,p"]
        for m in self.marginal:
            lines.append(",".join([m.diagnostic, _fmt(m.r), _fmt(m.p_r), _fmt(m.rho), _fmt(m.p_rho)]))
        return "\n".join(lines) + "\n"

    def conditional_csv(self) -> str:
        lines = ["I_bin,bin_size,rho_mu,p,rho_H,p,low_power"]
        for b in self.conditional:
            lines.append(",".join([b.label, str(b.size), _fmt(b.rho_mu), _fmt(b.p_mu),
                                   _fmt(b.rho_h), _fmt(b.p_h), str(int(b.low_power))]))
        return "\n".join(lines) + "\n"


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if abs(x) < 1e-3 and x != 0:
        return f"{x:.3e}"
    return f"{x:.6f}"


@dataclass
class DiagnosticTable:
    """Per-function diagnostic columns aligned with ``support``."""

    n: int
    fids: np.ndarray
    support: np.ndarray
    total: list[Fraction]
    log2_mu: list[Fraction]
    entropy: np.ndarray
    max_inf: np.ndarray
    cancellation: np.ndarray | None

    def column(self, name: str) -> np.ndarray:
        # rank-based columns use exact codes; pearson columns use float values
        if name == "I":
            return np.array([float(t) for t in self.total])
        if name == "mu":
            return np.exp2([float(x) for x in self.log2_mu])
        if name == "log2_mu":
            return np.array([float(x) for x in self.log2_mu])
        if name == "H_inf":
            return self.entropy
        if name == "max_inf":
            return self.max_inf
        if name == "cancellation":
            if self.cancellation is None:
                raise KeyError("no masks available for the cancellation diagnostic")
            return self.cancellation
        raise KeyError(name)

    def rank_column(self, name: str) -> np.ndarray:
        if name == "I":
            return _exact_ranks(self.total)
        if name in ("mu", "log2_mu"):
            return _exact_ranks(self.log2_mu)
        return self.column(name)


def diagnostic_table(certs) -> DiagnosticTable:
    certs = sorted(certs, key=lambda c: c.fid)
    if not certs:
        raise ValueError("no certificates")
    n = certs[0].n
    if any(c.n != n for c in certs):
        raise ValueError("certificates with mixed n")
    bad = [format_fid(c.fid, n) for c in certs if not c.optimal]
    if bad:
        raise ValueError(f"non-optimal certificates in correlation input: {bad[:5]}")
    fids = np.array([c.fid for c in certs], dtype=np.uint64)
    prof = profiles_for_tables(fids_to_tables(fids, n), n, fids)
    nums = prof.numerators.astype(np.float64)
    tot = nums.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(tot > 0, nums / np.where(tot > 0, tot, 1), 0.0)
        ent = -np.sum(np.where(p > 0, p * np.log2(np.where(p > 0, p, 1)), 0.0), axis=1)
    W = np.stack([c.mask.w for c in certs])
    _, rho_t = layer_cancellation_batch(W)
    return DiagnosticTable(n, fids, np.array([c.min_support for c in certs]), prof.total,
                           prof.log2_mu, ent, nums.max(axis=1) / prof.denominator,
                           rho_t.mean(axis=1))


def correlation_study(certs, diagnostics=DIAGNOSTICS, mode: str = "full",
                      seed: int | None = None, width: Fraction = BIN_WIDTH) -> CorrelationReport:
    """Marginal and influence-binned correlations of diagnostics with minimum support.

    Spearman correlations on ``I`` and ``mu`` rank the exact rationals, so ties
    in the margin product are genuine ties rather than float noise.
    """
    table = certs if isinstance(certs, DiagnosticTable) else diagnostic_table(certs)
    y = table.support.astype(np.float64)
    marginal = []
    for name in diagnostics:
        row = MarginalRow(name, None, None, None, None)
        try:
            r, pr = pearson(table.column(name), y)
            rho, prho = spearman(table.rank_column(name), y)
            row = MarginalRow(name, r, format_p(pr), rho, format_p(prho))
        except InsufficientVariance as exc:
            row.note = f"insufficient variance: {exc}"
        marginal.append(row)

    keys = [bin_key(t, width) for t in table.total]
    groups: dict[Fraction, list[int]] = defaultdict(list)
    for i, k in enumerate(keys):
        groups[k].append(i)
    mu_codes = _exact_ranks(table.log2_mu)
    conditional = []
    for k in sorted(groups):
        idx = np.array(groups[k])
        row = BinRow(k, len(idx), None, None, None, None, len(idx) < LOW_POWER)
        notes = []
        try:
            row.rho_mu, p = spearman(mu_codes[idx], y[idx])
            row.p_mu = format_p(p)
        except InsufficientVariance:
            notes.append("mu: insufficient variance")
        try:
            row.rho_h, p = spearman(table.entropy[idx], y[idx])
            row.p_h = format_p(p)
        except InsufficientVariance:
            notes.append("H: insufficient variance")
        row.note = "; ".join(notes)
        conditional.append(row)
    return CorrelationReport(table.n, mode, len(y), seed, marginal, conditional)
