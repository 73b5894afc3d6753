"""Independent slow reference implementations and frozen expected values.

Nothing here calls into the butterfly code; everything is built from the
definitions with dense matrices and brute force.
"""

from fractions import Fraction
from itertools import permutations, product

import numpy as np

# ---------------------------------------------------------------------------
# frozen values

DEGREE_HISTOGRAM_N3 = {1: 72, 2: 8, 3: 24, 5: 16, 6: 24, 7: 16, 35: 96}
SUPPORT_HISTOGRAM_N3 = {1: 16, 3: 112, 5: 128}
SUPPORT_HISTOGRAM_N4 = {1: 32, 3: 1120, 5: 18176, 7: 44800, 9: 1408}
NPN_CLASSES = {3: 14, 4: 222, 5: 616_126}
HEURISTIC_SUCCESSES_N4 = 51_200

# scaling table (2 decimals), odd n = 3..15
SCALING_2DP = {
    "parity": ["-1.50", "-2.50", "-3.50", "-4.50", "-5.50", "-6.50", "-7.50"],
    "majority": ["-1.00", "-1.36", "-1.67", "-1.93", "-2.17", "-2.39", "-2.60"],
    "dictator": ["-0.50"] * 7,
    "and_": ["-0.60", "-0.29", "-0.11", "-0.04", "-0.01", "-0.00", "-0.00"],
    "tribes": ["-0.60", "-1.09", "-1.32", "-1.45", "-1.45", "-1.72", "-1.92"],
}

# n=4 full universe, exact-mu ranks, bins rounded half-up to 0.05
N4_MARGINAL_SPEARMAN = {"I": 0.000, "mu": 0.017, "H_inf": -0.095, "max_inf": 0.095}
N4_BIN_SIZES = {1.00: 424, 1.25: 1728, 1.50: 6688, 1.75: 13568, 2.00: 20524}


# ---------------------------------------------------------------------------
# reference implementations


def dense_hadamard(n):
    N = 1 << n
    i = np.arange(N)
    return np.array([[(-1) ** bin(a & b).count("1") for b in i] for a in i], dtype=np.int64)


def table(fid, n):
    return np.array([-1 if (fid >> i) & 1 else 1 for i in range(1 << n)], dtype=np.int64)


def fid_of(values):
    return sum(1 << i for i, v in enumerate(values) if v < 0)


def influence_by_flips(values, n):
    """Inf_l as a Fraction: share of inputs where flipping x_l flips f."""
    N = 1 << n
    return [Fraction(sum(values[i] != values[i ^ (1 << l)] for i in range(N)), N)
            for l in range(n)]


def log2_mu_direct(infl):
    return -sum((x / (1 + x) for x in infl), Fraction(0))


def min_support_brute(values, n):
    """Smallest support over all 3^(2^n) ternary masks (n <= 3)."""
    H = dense_hadamard(n)
    best = None
    for w in product((-1, 0, 1), repeat=1 << n):
        w = np.array(w)
        k = int(np.count_nonzero(w))
        if best is not None and k >= best:
            continue
        if np.all(values * (H @ w) >= 1):
            best = k
    return best


def transform_values(values, n, perm, neg, out):
    """g(x) = (-1)^out f(y), y_j = (-1)^neg_j x_perm[j], coordinate by coordinate."""
    N = 1 << n
    g = np.empty(N, dtype=np.int64)
    for i in range(N):
        x = [-1 if (i >> j) & 1 else 1 for j in range(n)]
        y = [(-1 if (neg >> j) & 1 else 1) * x[perm[j]] for j in range(n)]
        src = sum(1 << j for j in range(n) if y[j] < 0)
        g[i] = (-1 if out else 1) * values[src]
    return g


def npn_canonical_brute(fid, n):
    vals = table(fid, n)
    return min(fid_of(transform_values(vals, n, p, neg, out))
               for p in permutations(range(n)) for neg in range(1 << n) for out in (0, 1))
