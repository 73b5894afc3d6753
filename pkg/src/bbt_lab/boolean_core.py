"""Truth tables, the fast Walsh-Hadamard transform and exact integer spectra.

Index convention used everywhere in the package: input index ``i`` encodes a
point of the cube with bit ``j`` of ``i`` set iff ``x_{j+1} = -1``; the subset
``S`` is a bitmask over coordinates.  The character is then
``chi_S(x_i) = (-1) ** popcount(i & S)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

MAX_N = 20


class NonIntegerResult(ArithmeticError):
    """Inverse transform did not divide exactly by ``2**n``."""


def character_sign(i: int, S: int) -> int:
    """Value of the Walsh character ``chi_S`` at input index ``i``."""
    return -1 if (i & S).bit_count() & 1 else 1


def popcount_table(N: int) -> np.ndarray:
    idx = np.arange(N, dtype=np.int64)
    out = np.zeros(N, dtype=np.int64)
    while idx.any():
        out += idx & 1
        idx >>= 1
    return out


def hadamard_matrix(n: int) -> np.ndarray:
    """Dense ``H_n`` as an int64 matrix, entry ``[i, S] = chi_S(x_i)``."""
    N = 1 << n
    idx = np.arange(N)
    par = popcount_table(N)[idx[:, None] & idx[None, :]] & 1
    return (1 - 2 * par).astype(np.int64)


def _log2_length(length: int) -> int:
    n = length.bit_length() - 1
    if length < 1 or (1 << n) != length:
        raise ValueError(f"length {length} is not a power of two")
    return n


def butterfly(vec: np.ndarray) -> np.ndarray:
    """Unnormalised Walsh-Hadamard transform along the last axis.

    Layer ``l`` (0-based) combines index pairs ``(i, i ^ 2**l)`` with the
    2x2 block ``[[1, 1], [1, -1]]``.  Works on any leading batch shape.
    Integer input stays integer (int64).
    """
    v = np.array(vec, dtype=np.int64 if np.asarray(vec).dtype.kind in "iub" else np.float64)
    N = v.shape[-1]
    n = _log2_length(N)
    lead = v.shape[:-1]
    for layer in range(n):
        h = 1 << layer
        blocks = v.reshape(*lead, N // (2 * h), 2, h)
        a = blocks[..., 0, :].copy()
        b = blocks[..., 1, :]
        blocks[..., 0, :] += b
        blocks[..., 1, :] = a - b
    return v


@dataclass(frozen=True, eq=False)
class TruthTable:
    """A Boolean function on ``n`` variables as a +-1 vector of length ``2**n``."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n <= MAX_N:
            raise ValueError(f"n must be in [1, {MAX_N}], got {self.n}")
        vals = np.asarray(self.values, dtype=np.int8)
        if vals.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} values, got shape {vals.shape}")
        if not np.all(np.abs(vals) == 1):
            raise ValueError("truth table entries must be +1 or -1")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_fid(cls, fid: int, n: int) -> TruthTable:
        N = 1 << n
        if not 0 <= fid < (1 << N):
            raise ValueError(f"fid {fid:#x} out of range for n={n}")
        raw = np.frombuffer(int(fid).to_bytes((N + 7) // 8, "little"), dtype=np.uint8)
        bits = np.unpackbits(raw, bitorder="little")[:N]
        return cls(n, 1 - 2 * bits.astype(np.int8))

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def fid(self) -> int:
        bits = (self.values < 0).astype(np.uint8)
        return int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little")

    def __eq__(self, other):
        if not isinstance(other, TruthTable):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((self.n, self.values.tobytes()))

    def __repr__(self):
        return f"TruthTable(n={self.n}, fid={self.fid:#x})"


@dataclass(frozen=True, eq=False)
class IntegerSpectrum:
    """Scaled Fourier coefficients ``coeffs[S] = 2**n * fhat(S)`` as exact integers."""

    n: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.int64)
        if c.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} coefficients, got shape {c.shape}")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def fourier(self, S: int) -> Fraction:
        return Fraction(int(self.coeffs[S]), 1 << self.n)

    def parseval_sum(self) -> int:
        return sum(int(c) * int(c) for c in self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, IntegerSpectrum):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash((self.n, self.coeffs.tobytes()))


def fwht(t: TruthTable) -> IntegerSpectrum:
    return IntegerSpectrum(t.n, butterfly(t.values))


def fwht_inverse(s: IntegerSpectrum) -> TruthTable | np.ndarray:
    """Invert :func:`fwht`.

    Returns a :class:`TruthTable` when the result is +-1 valued, otherwise the
    integer vector.  Raises :class:`NonIntegerResult` if ``2**n`` does not
    divide every entry of the butterfly output.
    """
    raw = butterfly(s.coeffs)
    N = 1 << s.n
    if np.any(raw % N):
        raise NonIntegerResult(f"spectrum does not invert to an integer vector (n={s.n})")
    vals = raw // N
    if np.all(np.abs(vals) == 1):
        return TruthTable(s.n, vals)
    return vals


def apply_hadamard(w) -> np.ndarray:
    """Exact ``H_n @ w`` for an integer vector of length ``2**n``."""
    w = np.asarray(w)
    if w.dtype.kind not in "iub":
        raise TypeError("apply_hadamard is integer-only")
    return butterfly(w.astype(np.int64))


def all_truth_tables(n: int) -> np.ndarray:
    """Every function on ``n <= 4`` variables as rows of an int8 matrix, row index = fid."""
    if n > 4:
        raise ValueError("exhaustive universe only materialised for n <= 4")
    N = 1 << n
    fids = np.arange(1 << N, dtype=np.int64)
    bits = (fids[:, None] >> np.arange(N)[None, :]) & 1
    return (1 - 2 * bits).astype(np.int8)


def fids_to_tables(fids, n: int) -> np.ndarray:
    """Vectorised fid decoding for ``n <= 5`` (fids fit in 64 bits)."""
    fids = np.asarray(fids, dtype=np.uint64)
    N = 1 << n
    bits = (fids[:, None] >> np.arange(N, dtype=np.uint64)[None, :]) & np.uint64(1)
    return (1 - 2 * bits.astype(np.int8)).astype(np.int8)


def tables_to_fids(tables: np.ndarray) -> np.ndarray:
    tables = np.asarray(tables)
    N = tables.shape[-1]
    if N > 64:
        raise ValueError("vectorised fid encoding limited to 64-entry tables")
    bits = (tables < 0).astype(np.uint64)
    return (bits << np.arange(N, dtype=np.uint64)).sum(axis=-1, dtype=np.uint64)


def format_fid(fid: int, n: int) -> str:
    return f"0x{fid:0{max(1, (1 << n) // 4)}x}"
