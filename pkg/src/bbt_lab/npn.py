"""NPN equivalence: transforms, canonical forms and class enumeration by orbit marking.

A transform ``(perm, neg, out)`` maps ``f`` to

    g(x) = (-1)^out * f(y),   y_j = (-1)^{neg_j} * x_{perm[j]}

In index space this is a fixed permutation of the ``2^n`` truth-table
positions followed by an optional global sign flip.
"""

from __future__ import annotations

import json
import math
import random
import time
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations
from pathlib import Path

import numpy as np

from . import _kernels
from .boolean_core import TruthTable, butterfly, fids_to_tables, format_fid
from .influence import influence_numerators
from .invariant import _log2_mu_from_sorted
from .minsupport import min_support_exact

MAX_NPN_N = 5
KNOWN_CLASS_COUNTS = {1: 2, 2: 4, 3: 14, 4: 222, 5: 616_126}
UNIVERSE_FORMAT = "npn-universe-v1"


class UniverseMemoryError(MemoryError):
    """The visited bitmap for orbit marking could not be allocated."""


@dataclass(frozen=True)
class NpnTransform:
    perm: tuple[int, ...]
    neg: int = 0
    out: bool = False

    def __post_init__(self):
        n = len(self.perm)
        if sorted(self.perm) != list(range(n)):
            raise ValueError(f"not a permutation of range({n}): {self.perm}")
        if not 0 <= self.neg < (1 << n):
            raise ValueError(f"negation mask {self.neg:#x} out of range for n={n}")

    @property
    def n(self) -> int:
        return len(self.perm)

    @classmethod
    def identity(cls, n: int) -> NpnTransform:
        return cls(tuple(range(n)))

    def index_table(self) -> np.ndarray:
        """``src[i]``: the position of ``f`` read by position ``i`` of the image."""
        return _index_table(self.perm, self.neg)

    @classmethod
    def from_table(cls, src: np.ndarray, out: bool = False) -> NpnTransform:
        n = len(src).bit_length() - 1
        neg = int(src[0])
        perm = [0] * n
        for k in range(n):
            moved = int(src[1 << k]) ^ neg
            perm[moved.bit_length() - 1] = k
        return cls(tuple(perm), neg, out)

    def compose(self, first: NpnTransform) -> NpnTransform:
        """The transform that applies ``first`` and then ``self``."""
        src = first.index_table()[self.index_table()]
        return NpnTransform.from_table(src, self.out ^ first.out)

    def inverse(self) -> NpnTransform:
        src = self.index_table()
        inv = np.empty_like(src)
        inv[src] = np.arange(len(src))
        return NpnTransform.from_table(inv, self.out)


@lru_cache(maxsize=4096)
def _index_table(perm: tuple[int, ...], neg: int) -> np.ndarray:
    n = len(perm)
    i = np.arange(1 << n, dtype=np.int64)
    src = np.zeros_like(i)
    for j, pj in enumerate(perm):
        src |= (((i >> pj) & 1) ^ ((neg >> j) & 1)) << j
    src.setflags(write=False)
    return src


def group_order(n: int) -> int:
    return 2 * (1 << n) * math.factorial(n)


def apply_transform(f: TruthTable, t: NpnTransform) -> TruthTable:
    if t.n != f.n:
        raise ValueError(f"transform on {t.n} variables applied to n={f.n}")
    vals = f.values[t.index_table()]
    return TruthTable(f.n, -vals if t.out else vals)


def all_transforms(n: int):
    for perm in permutations(range(n)):
        for neg in range(1 << n):
            for out in (False, True):
                yield NpnTransform(perm, neg, out)


def random_transform(n: int, rng: random.Random) -> NpnTransform:
    perm = list(range(n))
    rng.shuffle(perm)
    return NpnTransform(tuple(perm), rng.randrange(1 << n), bool(rng.getrandbits(1)))


# ---------------------------------------------------------------------------
# packed-word orbit walking


def _sjt_swaps(n: int) -> list[int]:
    """Adjacent transpositions (swap j, j+1) visiting all n! orders once."""
    perm = list(range(n))
    dirs = [-1] * n
    swaps = []
    while True:
        mobile, idx = -1, -1
        for i, v in enumerate(perm):
            j = i + dirs[v]
            if 0 <= j < n and perm[j] < v and v > mobile:
                mobile, idx = v, i
        if mobile < 0:
            return swaps
        j = idx + dirs[mobile]
        perm[idx], perm[j] = perm[j], perm[idx]
        swaps.append(min(idx, j))
        for v in range(mobile + 1, n):
            dirs[v] = -dirs[v]


@dataclass(frozen=True)
class _WalkTables:
    n: int
    full: np.uint64
    low: np.ndarray
    swap01: np.ndarray
    sjt: np.ndarray
    gray: np.ndarray


@lru_cache(maxsize=None)
def _walk_tables(n: int) -> _WalkTables:
    if not 1 <= n <= MAX_NPN_N:
        raise ValueError(f"NPN orbit walking supports 1 <= n <= {MAX_NPN_N}")
    N = 1 << n
    pos = np.arange(N, dtype=np.uint64)
    weights = np.uint64(1) << pos

    def mask(sel):
        return np.uint64(weights[sel].sum(dtype=np.uint64))

    low = np.array([mask(((pos >> np.uint64(j)) & np.uint64(1)) == 0) for j in range(n)],
                   dtype=np.uint64)
    swap01 = np.zeros(max(n - 1, 1), dtype=np.uint64)
    for j in range(n - 1):
        b0 = (pos >> np.uint64(j)) & np.uint64(1)
        b1 = (pos >> np.uint64(j + 1)) & np.uint64(1)
        swap01[j] = mask((b0 == 1) & (b1 == 0))
    # reflected Gray code as a closed cycle: 2^n flips return to the start
    gray = np.array([(g + 1 & -(g + 1)).bit_length() - 1 for g in range((1 << n) - 1)] + [n - 1],
                    dtype=np.int64)
    full = np.uint64((1 << N) - 1)
    return _WalkTables(n, full, low, swap01, np.array(_sjt_swaps(n), dtype=np.int64), gray)


def orbit_fids(fid: int, n: int) -> np.ndarray:
    """All distinct fids in the NPN orbit of ``fid``, ascending."""
    w = _walk_tables(n)
    buf = np.empty((1 << n) * math.factorial(n), dtype=np.uint64)
    _kernels.orbit_members(np.uint64(fid), n, w.low, w.swap01, w.sjt, w.gray, buf)
    return np.unique(np.concatenate([buf, buf ^ w.full]))


def canonicalize(f: TruthTable | int, n: int | None = None) -> int:
    """Lex-least fid over the NPN orbit."""
    if isinstance(f, TruthTable):
        fid, n = f.fid, f.n
    else:
        fid = int(f)
        if n is None:
            raise ValueError("n is required when canonicalizing a bare fid")
    if n > MAX_NPN_N:
        raise ValueError(f"canonicalize supports n <= {MAX_NPN_N}")
    w = _walk_tables(n)
    buf = np.empty((1 << n) * math.factorial(n), dtype=np.uint64)
    _kernels.orbit_members(np.uint64(fid), n, w.low, w.swap01, w.sjt, w.gray, buf)
    return int(min(buf.min(), (buf ^ w.full).min()))


# ---------------------------------------------------------------------------
# universes


@dataclass(frozen=True, eq=False)
class NpnUniverse:
    n: int
    canonical_fids: np.ndarray  # ascending uint64
    elapsed: float = field(default=0.0, compare=False)

    @property
    def class_count(self) -> int:
        return len(self.canonical_fids)

    def __eq__(self, other):
        if not isinstance(other, NpnUniverse):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.canonical_fids, other.canonical_fids)

    def __contains__(self, fid) -> bool:
        k = np.searchsorted(self.canonical_fids, np.uint64(fid))
        return bool(k < len(self.canonical_fids) and self.canonical_fids[k] == np.uint64(fid))

    def dumps(self) -> str:
        head = json.dumps({"format": UNIVERSE_FORMAT, "n": self.n, "count": self.class_count},
                          sort_keys=True)
        width = max(1, (1 << self.n) // 4)
        body = "".join(f"0x{int(x):0{width}x}\n" for x in self.canonical_fids)
        return head + "\n" + body

    def save(self, path) -> Path:
        path = Path(path)
        path.write_text(self.dumps())
        return path

    @classmethod
    def load(cls, path) -> NpnUniverse:
        with open(path) as fh:
            head = json.loads(fh.readline())
            if head.get("format") != UNIVERSE_FORMAT:
                raise ValueError(f"unknown universe format {head.get('format')!r} in {path}")
            fids = np.array([int(line, 16) for line in fh if line.strip()], dtype=np.uint64)
        if len(fids) != head["count"]:
            raise ValueError(f"{path}: header count {head['count']} but {len(fids)} entries")
        if len(fids) > 1 and np.any(np.diff(fids.astype(np.int64)) <= 0):
            raise ValueError(f"{path}: canonical fids are not strictly ascending")
        return cls(int(head["n"]), fids)


def enumerate_universe(n: int, chunk: int = 1 << 22, progress=None) -> NpnUniverse:
    """Canonical representatives of every NPN class on ``n <= 5`` variables.

    Walks fids upward and marks the orbit of every unvisited one.  Only fids
    below ``2^(N-1)`` need visiting (the lex-least member of an orbit closed
    under complement has its top bit clear), which halves the bitmap: 256 MiB
    at n=5.  ``progress(done_fraction, classes_so_far)`` is called per chunk.
    """
    if not 1 <= n <= MAX_NPN_N:
        raise ValueError(f"enumerate_universe supports 1 <= n <= {MAX_NPN_N}")
    t0 = time.perf_counter()
    w = _walk_tables(n)
    half = 1 << ((1 << n) - 1)
    try:
        bitmap = np.zeros(max(1, half >> 6), dtype=np.uint64)
    except MemoryError as exc:
        raise UniverseMemoryError(
            f"could not allocate the {half // 8 / 2**20:.0f} MiB visited bitmap for n={n}") from exc
    buf = np.empty(min(chunk, half), dtype=np.uint64)
    parts = []
    found = 0
    for start in range(0, half, chunk):
        stop = min(start + chunk, half)
        k = _kernels.mark_orbits(start, stop, n, w.full, w.low, w.swap01, w.sjt, w.gray,
                                 bitmap, buf)
        parts.append(buf[:k].copy())
        found += k
        if progress is not None:
            progress(stop / half, found)
    return NpnUniverse(n, np.concatenate(parts), time.perf_counter() - t0)


def orbit_partition_total(universe: NpnUniverse) -> int:
    """Sum of orbit sizes over all classes; equals ``2^(2^n)`` for a complete universe."""
    return sum(len(orbit_fids(int(c), universe.n)) for c in universe.canonical_fids)


# ---------------------------------------------------------------------------
# invariance audit


@dataclass(frozen=True)
class NpnAuditReport:
    n: int
    functions: int
    transforms_per_function: int
    failures: tuple[tuple[str, str, str], ...]  # (fid, transform repr, field)
    support_checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.failures


def npn_invariance_audit(fids, n: int, seed: int = 0, transforms: int = 100,
                         check_support: bool = False) -> NpnAuditReport:
    """Check that NPN transforms preserve I, log2 mu and the influence multiset.

    The influence vector must also permute exactly: coordinate ``perm[j]`` of
    the image carries the influence of coordinate ``j`` of the original.  With
    ``check_support`` the exact minimum support of ``f`` and its images is
    compared as well (cheap only for small n).
    """
    rng = random.Random(seed)
    fids = [int(x) for x in fids]
    den = 4 ** n
    failures = []
    support_checked = 0
    base_tables = fids_to_tables(fids, n) if fids else np.zeros((0, 1 << n), np.int8)
    for fid, row in zip(fids, base_tables):
        ts = [random_transform(n, rng) for _ in range(transforms)]
        imgs = np.stack([row[t.index_table()] * (-1 if t.out else 1) for t in ts])
        batch = np.concatenate([row[None, :], imgs]).astype(np.int64)
        infl = influence_numerators(butterfly(batch), n)
        ref = infl[0]
        ref_mu = _log2_mu_from_sorted(tuple(sorted(int(a) for a in ref)), den)
        ref_support = None
        if check_support:
            ref_support = min_support_exact(TruthTable(n, row)).min_support
        for t, vec in zip(ts, infl[1:]):
            tag = (format_fid(fid, n), repr(t))
            if vec.sum() != ref.sum():
                failures.append(tag + ("total_influence",))
            if sorted(vec.tolist()) != sorted(ref.tolist()):
                failures.append(tag + ("influence_multiset",))
            if any(vec[t.perm[j]] != ref[j] for j in range(n)):
                failures.append(tag + ("influence_covariance",))
            if _log2_mu_from_sorted(tuple(sorted(int(a) for a in vec)), den) != ref_mu:
                failures.append(tag + ("log2_mu",))
        if check_support:
            for t in ts[: max(1, transforms // 10)]:
                g = apply_transform(TruthTable(n, row), t)
                support_checked += 1
                if min_support_exact(g).min_support != ref_support:
                    failures.append((format_fid(fid, n), repr(t), "min_support"))
    return NpnAuditReport(n, len(fids), transforms, tuple(failures), support_checked)
