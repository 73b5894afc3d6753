from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bbt_lab.boolean_core import TruthTable, all_truth_tables, butterfly, fwht
from bbt_lab.families import (
    FamilySpec,
    InvalidSpec,
    family_log2_mu,
    generate,
    scaling_csv,
    scaling_table,
    tribes_blocks,
)
from bbt_lab.synthesis import (
    RepairExhausted,
    TernaryMask,
    fourier_rounding,
    fourier_rounding_gradient,
    greedy_repair,
    heuristic_mask,
    heuristic_success_count,
    multi_start_repair,
    synthesize,
    verify,
)

from oracles import SCALING_2DP, dense_hadamard, min_support_brute, table

ODD_N = (3, 5, 7, 9, 11, 13, 15)


# ---------------------------------------------------------------------------
# families


def test_family_generators():
    assert list(generate(FamilySpec("parity", 2)).values) == [1, -1, -1, 1]
    a = generate(FamilySpec("and_", 3)).values
    assert a[0] == 1 and np.all(a[1:] == -1)
    o = generate(FamilySpec("or_", 3)).values
    assert o[-1] == -1 and np.all(o[:-1] == 1)
    maj = generate(FamilySpec("majority", 5)).values
    sums = [5 - 2 * bin(i).count("1") for i in range(32)]
    assert list(maj) == [1 if s > 0 else -1 for s in sums]
    d = generate(FamilySpec("dictator", 3, k=2)).values
    assert list(d) == [1, 1, -1, -1, 1, 1, -1, -1]


def test_family_validation():
    with pytest.raises(InvalidSpec):
        FamilySpec("majority", 4)
    with pytest.raises(InvalidSpec):
        FamilySpec("dictator", 3, k=4)
    with pytest.raises(InvalidSpec):
        FamilySpec("xor", 3)


def test_tribes_blocks():
    assert tribes_blocks(3) == [(0,), (1,), (2,)]
    assert tribes_blocks(9) == [(0, 1, 2), (3, 4, 5), (6, 7, 8)]
    assert tribes_blocks(5) == [(0, 1), (2, 3)]


@pytest.mark.parametrize("family", sorted(SCALING_2DP))
def test_scaling_rows(family):
    rows = [r for r in scaling_table(families=(family,))]
    assert [r["log2_mu_2dp"] for r in rows] == SCALING_2DP[family]


def test_parity_row_exact():
    for n in ODD_N:
        assert family_log2_mu(FamilySpec("parity", n)) == Fraction(-n, 2)
    assert family_log2_mu(FamilySpec("dictator", 7)) == Fraction(-1, 2)


def test_scaling_csv_layout():
    text = scaling_csv(scaling_table(n_values=(3,), families=("majority",)))
    assert text.splitlines() == ["family,n,log2_mu_exact,log2_mu_2dp", "majority,3,-1/1,-1.00"]


# ---------------------------------------------------------------------------
# synthesis


def test_verify_examples():
    par = TruthTable(2, np.array([1, -1, -1, 1]))
    ok = verify(TernaryMask(2, np.array([0, 0, 0, 1])), par)
    assert ok.ok and ok.margin == 1
    zero = verify(TernaryMask(2, np.zeros(4, dtype=np.int8)), par)
    assert not zero.ok and zero.margin == 0


def test_mask_validation():
    with pytest.raises(ValueError):
        TernaryMask(2, np.array([0, 2, 0, 0]))
    with pytest.raises(ValueError):
        TernaryMask(2, np.array([0, 1, 0]))


def test_heuristic_examples():
    par = generate(FamilySpec("parity", 4))
    w = heuristic_mask(fwht(par), 0.5)
    assert w.support == 1 and verify(w, par).ok
    const = TruthTable.from_fid(0, 3)
    assert list(heuristic_mask(fwht(const), 0.5).w) == [1] + [0] * 7
    with pytest.raises(ValueError):
        heuristic_mask(fwht(const), 0.0)


def test_heuristic_count_n4():
    assert heuristic_success_count(4, 0.05) == 51_200


@settings(max_examples=40)
@given(st.integers(0, 2**16 - 1))
def test_gradient_equals_spectrum(fid):
    f = TruthTable.from_fid(fid, 4)
    assert np.array_equal(fourier_rounding_gradient(f), fwht(f).coeffs)


def test_gradient_parity():
    par = generate(FamilySpec("parity", 3))
    g = fourier_rounding_gradient(par)
    assert g[7] == 8 and np.all(g[:7] == 0)


def test_greedy_repair_immediate_return():
    maj = generate(FamilySpec("majority", 3))
    w0 = TernaryMask(3, np.array([0, 1, 1, 0, 1, 0, 0, 0]))
    res = greedy_repair(w0, maj)
    assert res.iterations == 0 and res.mask == w0


def test_greedy_from_zero_consistent_with_oracle_n3():
    # every n=3 function is representable; repair from zero either succeeds or exhausts cleanly
    H = dense_hadamard(3)
    for fid in range(256):
        f = TruthTable.from_fid(fid, 3)
        try:
            res = greedy_repair(TernaryMask(3, np.zeros(8, np.int8)), f, max_iter=64)
        except RepairExhausted as exc:
            assert not verify(exc.mask, f).ok
            continue
        assert np.all(table(fid, 3) * (H @ res.mask.w.astype(np.int64)) >= 1)


def test_multi_start_all_n3():
    statuses = {}
    for fid in range(256):
        f = TruthTable.from_fid(fid, 3)
        res = multi_start_repair(f)
        assert verify(res.mask, f).ok
        statuses[res.status] = statuses.get(res.status, 0) + 1
    assert sum(statuses.values()) == 256


def test_fourier_rounding_solves_every_heuristic_failure_n4():
    T = all_truth_tables(4).astype(np.int64)
    C = butterfly(T)
    W = np.where(np.abs(C) > 0.05 * 16, np.sign(C), 0)
    failures = np.flatnonzero(~np.all(T * butterfly(W) >= 1, axis=1))
    assert len(failures) == 14_336
    for fid in failures[::37]:
        res = fourier_rounding(TruthTable.from_fid(int(fid), 4))
        assert res is not None and res.status == "rounded"


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**16 - 1))
def test_synthesis_margin_parity_and_determinism(fid):
    f = TruthTable.from_fid(fid, 4)
    a = multi_start_repair(f)
    b = multi_start_repair(f)
    assert a.mask == b.mask and a.strategy == b.strategy
    chk = verify(a.mask, f)
    assert chk.ok
    assert np.all((chk.margin_vector - a.mask.support) % 2 == 0)


def test_synthesize_heuristic_only_reports_failure():
    # the first heuristic failure at n=4, tau = 0.05 (none exist at n=3)
    T = all_truth_tables(4).astype(np.int64)
    W = np.where(np.abs(butterfly(T)) > 0.8, np.sign(butterfly(T)), 0)
    bad = int(np.flatnonzero(~np.all(T * butterfly(W) >= 1, axis=1))[0])
    f = TruthTable.from_fid(bad, 4)
    res = synthesize(f, heuristic_only=True)
    assert res.status == "failed" and res.mask is None
    assert synthesize(f).mask is not None
    rec = res.record(f)
    assert rec["support"] is None and rec["status"] == "failed"


def test_min_support_brute_oracle_examples():
    assert min_support_brute(table(0xE8, 3), 3) == 3
    assert min_support_brute(table(0, 3), 3) == 1
