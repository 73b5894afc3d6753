"""Compiled inner loops: level search for minimum support and NPN orbit marking."""

from __future__ import annotations

import numpy as np
from numba import njit

# status codes of search_level
INFEASIBLE = 0
FOUND = 1
PAUSED = 2

# layout of the int64 scalar state vector
_J, _U, _TOTAL, _NODES = 0, 1, 2, 3
# slack buckets 2, 4, ..., 2*(_NSLACK-1), and one catch-all bucket
_NSLACK = 5


@njit(cache=True, inline="always")
def popcount64(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return np.int64((x * np.uint64(0x0101010101010101)) >> np.uint64(56))


@njit(cache=True, nogil=True)
def _minus_bound_fails(posmask, negmask, j, M, r, rows, budget, T, counts):
    """True if the ``r`` cheapest remaining picks put more -1 entries on ``rows`` than allowed.

    A remaining position costs ``popcount(minus rows & rows)`` for its cheaper
    admissible sign; the ``r`` smallest costs must fit in ``budget``.
    """
    for c in range(65):
        counts[c] = 0
    avail = 0
    for q in range(j, M):
        best = 65
        if (T & ~posmask[q]) == 0:
            best = popcount64(negmask[q] & rows)
        if (T & ~negmask[q]) == 0:
            alt = popcount64(posmask[q] & rows)
            if alt < best:
                best = alt
        if best < 65:
            counts[best] += 1
            avail += 1
    if avail < r:
        return True
    need = r
    acc = 0
    for c in range(65):
        take = counts[c] if counts[c] < need else need
        acc += take * c
        need -= take
        if acc > budget:
            return True
        if need == 0:
            break
    return False


@njit(cache=True, nogil=True)
def search_level(cols, posmask, negmask, prefix, k, node_chunk, y, opt, tight, chosen, state):
    """Resumable exhaustive search for ``k`` signed columns with every row sum >= 1.

    ``cols[j]`` is the j-th ranked candidate oriented to its preferred sign;
    picking it with sign -1 uses ``-cols[j]``.  Exactly ``k`` picks are made,
    so each row ends with the parity of ``k`` and must reach ``t = 1`` (odd k)
    or ``t = 2`` (even k).  A row whose slack ``y_i + r - t`` is zero admits
    only columns that are +1 on it; rows with small slack bound how many -1
    entries the remaining picks may place on them.  ``prefix`` holds running
    sums of the ranked column totals for an O(1) bound on the grand total.

    The search walks positions in rank order, trying +1, -1, skip.  It stops
    after ``node_chunk`` new nodes with status PAUSED and can be resumed by
    calling again with the same state arrays (``state[_J] = -1`` means fresh).
    On FOUND ``chosen[j]`` holds +1 / -1 / 0 relative to the oriented column.
    """
    M, N = cols.shape
    t = 1 if k % 2 == 1 else 2
    need_total = N * t
    counts = np.zeros(65, np.int64)
    slack_rows = np.zeros(_NSLACK, np.uint64)
    slack_budget = np.zeros(_NSLACK, np.int64)
    if state[_J] < 0:
        for i in range(N):
            y[i] = 0
        for q in range(M + 1):
            opt[q] = -1
            chosen[q] = 0
        state[_J] = 0
        state[_U] = 0
        state[_TOTAL] = 0
    j = state[_J]
    u = state[_U]
    total = state[_TOTAL]
    budget_end = state[_NODES] + node_chunk
    nodes = state[_NODES]
    status = INFEASIBLE
    while True:
        if opt[j] == -1:
            if nodes >= budget_end:
                status = PAUSED
                break
            nodes += 1
            r = k - u
            ok = True
            if r == 0:
                for i in range(N):
                    if y[i] < 1:
                        ok = False
                        break
                if ok:
                    status = FOUND
                    break
            elif M - j < r:
                ok = False
            elif total + prefix[j + r] - prefix[j] < need_total:
                ok = False
            else:
                T = np.uint64(0)
                for q in range(_NSLACK):
                    slack_rows[q] = np.uint64(0)
                    slack_budget[q] = 0
                for i in range(N):
                    s = y[i] + r - t
                    if s < 0:
                        ok = False
                        break
                    bit = np.uint64(1) << np.uint64(i)
                    if s == 0:
                        T |= bit
                    else:
                        q = s // 2 - 1
                        if q >= _NSLACK:
                            q = _NSLACK - 1
                        slack_rows[q] |= bit
                        slack_budget[q] += s // 2
                tight[j] = T
                if ok and r >= 2:
                    # cumulative low-slack row sets: slack <= 2, <= 4, ...; last bucket is everything
                    rows = np.uint64(0)
                    allowed = 0
                    for q in range(_NSLACK):
                        if slack_rows[q] == np.uint64(0):
                            continue
                        rows |= slack_rows[q]
                        allowed += slack_budget[q]
                        if _minus_bound_fails(posmask, negmask, j, M, r, rows, allowed, T, counts):
                            ok = False
                            break
            if not ok:
                if j == 0:
                    status = INFEASIBLE
                    break
                j -= 1
                c = chosen[j]
                if c != 0:
                    for i in range(N):
                        y[i] -= c * cols[j, i]
                    u -= 1
                    total -= c * (prefix[j + 1] - prefix[j])
                    chosen[j] = 0
                continue
            opt[j] = 0
        o = opt[j]
        T = tight[j]
        r = k - u
        if o == 0:
            opt[j] = 1
            if (T & ~posmask[j]) == 0:
                for i in range(N):
                    y[i] += cols[j, i]
                u += 1
                total += prefix[j + 1] - prefix[j]
                chosen[j] = 1
                j += 1
                opt[j] = -1
            continue
        if o == 1:
            opt[j] = 2
            if (T & ~negmask[j]) == 0:
                for i in range(N):
                    y[i] -= cols[j, i]
                u += 1
                total -= prefix[j + 1] - prefix[j]
                chosen[j] = -1
                j += 1
                opt[j] = -1
            continue
        if o == 2:
            opt[j] = 3
            if M - j - 1 >= r:
                chosen[j] = 0
                j += 1
                opt[j] = -1
            continue
        if j == 0:
            status = INFEASIBLE
            break
        j -= 1
        c = chosen[j]
        if c != 0:
            for i in range(N):
                y[i] -= c * cols[j, i]
            u -= 1
            total -= c * (prefix[j + 1] - prefix[j])
            chosen[j] = 0
    state[_J] = j
    state[_U] = u
    state[_TOTAL] = total
    state[_NODES] = nodes
    return status


# ---------------------------------------------------------------------------
# NPN orbit walking on packed truth tables (bit i of the word = entry i)


@njit(cache=True, inline="always")
def _negate_var(t, j, low):
    # g(i) = f(i ^ 2^j): exchange the two halves of every 2^(j+1) block
    sh = np.uint64(1) << np.uint64(j)
    return ((t & low[j]) << sh) | ((t >> sh) & low[j])


@njit(cache=True, inline="always")
def _swap_vars(t, j, swap01):
    # exchange index bits j and j+1 with a delta swap of distance 2^j
    sh = np.uint64(1) << np.uint64(j)
    x = (t ^ (t >> sh)) & swap01[j]
    return t ^ x ^ (x << sh)


@njit(cache=True)
def orbit_members(t, n, low, swap01, sjt, gray, out):
    """Write the ``2^n n!`` input-transformed images of ``t`` into ``out``.

    Output negation is left to the caller (complement of every entry).
    """
    cur = t
    k = 0
    nperm = len(sjt) + 1
    ng = 1 << n
    for p in range(nperm):
        for g in range(ng):
            out[k] = cur
            k += 1
            cur = _negate_var(cur, gray[g], low)
        if p < nperm - 1:
            cur = _swap_vars(cur, sjt[p], swap01)
    return k


@njit(cache=True)
def mark_orbits(start, stop, n, full, low, swap01, sjt, gray, bitmap, out):
    """Orbit marking over fids in ``[start, stop)``, all below ``2^(N-1)``.

    Every orbit is closed under complement, so the bitmap stores the folded
    value ``min(h, ~h)`` of each member; its lex-least fid always has the top
    bit clear.  Unvisited fids are canonical and are appended to ``out``.
    """
    half = (full >> np.uint64(1)) + np.uint64(1)
    one = np.uint64(1)
    nperm = len(sjt) + 1
    ng = 1 << n
    count = 0
    for f in range(start, stop):
        fu = np.uint64(f)
        if (bitmap[f >> 6] >> (fu & np.uint64(63))) & one:
            continue
        out[count] = fu
        count += 1
        cur = fu
        for p in range(nperm):
            for g in range(ng):
                m = cur if cur < half else cur ^ full
                bitmap[np.int64(m >> np.uint64(6))] |= one << (m & np.uint64(63))
                cur = _negate_var(cur, gray[g], low)
            if p < nperm - 1:
                cur = _swap_vars(cur, sjt[p], swap01)
    return count
