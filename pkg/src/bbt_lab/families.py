"""Canonical function families and the log2-mu scaling table."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .boolean_core import MAX_N, TruthTable, fwht, popcount_table
from .influence import influences
from .invariant import contraction_profile

KINDS = ("parity", "majority", "dictator", "and_", "or_", "tribes")
TABLE_FAMILIES = ("parity", "majority", "dictator", "and_", "tribes")


class InvalidSpec(ValueError):
    pass


def tribes_blocks(n: int) -> list[tuple[int, ...]]:
    """Blocks of width ``floor(log2 n)``; coordinates past the last full block are unused."""
    w = max(1, int(math.floor(math.log2(n))))
    return [tuple(range(b * w, (b + 1) * w)) for b in range(n // w)]


@dataclass(frozen=True)
class FamilySpec:
    kind: str
    n: int
    k: int = 1  # dictator coordinate, 1-based

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidSpec(f"unknown family {self.kind!r}")
        if not 1 <= self.n <= MAX_N:
            raise InvalidSpec(f"n={self.n} unsupported")
        if self.kind == "majority" and self.n % 2 == 0:
            raise InvalidSpec("majority needs odd n")
        if self.kind == "dictator" and not 1 <= self.k <= self.n:
            raise InvalidSpec(f"dictator coordinate {self.k} not in 1..{self.n}")


def generate(spec: FamilySpec) -> TruthTable:
    """Truth table of the family member; +1 plays the role of TRUE for AND/OR/tribes."""
    n = spec.n
    N = 1 << n
    idx = np.arange(N, dtype=np.int64)
    if spec.kind == "parity":
        vals = 1 - 2 * (popcount_table(N) & 1)
    elif spec.kind == "majority":
        # coordinate sum = n - 2 * popcount
        vals = np.where(2 * popcount_table(N) < n, 1, -1)
    elif spec.kind == "dictator":
        vals = 1 - 2 * ((idx >> (spec.k - 1)) & 1)
    elif spec.kind == "and_":
        vals = np.where(idx == 0, 1, -1)
    elif spec.kind == "or_":
        vals = np.where(idx == N - 1, -1, 1)
    else:
        hit = np.zeros(N, dtype=bool)
        for block in tribes_blocks(n):
            m = sum(1 << j for j in block)
            hit |= (idx & m) == 0
        vals = np.where(hit, 1, -1)
    return TruthTable(n, vals)


def family_log2_mu(spec: FamilySpec) -> Fraction:
    return contraction_profile(influences(fwht(generate(spec)))).log2_mu


def format_2dp(x: Fraction) -> str:
    return f"{float(x):.2f}"


def scaling_table(n_values=(3, 5, 7, 9, 11, 13, 15), families=TABLE_FAMILIES) -> list[dict]:
    """Rows ``{family, n, log2_mu_exact, log2_mu_2dp}`` computed end to end from truth tables."""
    rows = []
    for fam in families:
        for n in n_values:
            if n % 2 == 0 or n > 15:
                raise InvalidSpec("scaling table uses odd n <= 15")
            r = family_log2_mu(FamilySpec(fam, n))
            rows.append({"family": fam, "n": n, "log2_mu_exact": r, "log2_mu_2dp": format_2dp(r)})
    return rows


def scaling_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["family", "n", "log2_mu_exact", "log2_mu_2dp"])
    for row in rows:
        r = row["log2_mu_exact"]
        w.writerow([row["family"], row["n"], f"{r.numerator}/{r.denominator}", row["log2_mu_2dp"]])
    return buf.getvalue()
