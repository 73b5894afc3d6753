from fractions import Fraction

import numpy as np
import pytest

from bbt_lab import analytics as A
from bbt_lab.npn import enumerate_universe

from oracles import DEGREE_HISTOGRAM_N3, influence_by_flips, log2_mu_direct, table


def test_degree_histogram_n3():
    h = A.degree_histogram(3)
    assert h == DEGREE_HISTOGRAM_N3
    assert sum(h.values()) == 256


def test_separation_census_n3():
    rep = A.separation_census(3)
    assert rep.universe_size == 256
    # brute-force recount from the definitions
    prof = {f: (sum(influence_by_flips(table(f, 3), 3)),
                log2_mu_direct(influence_by_flips(table(f, 3), 3))) for f in range(256)}
    brute = sum(1 for f in range(256) for g in range(f + 1, 256)
                if prof[f][0] == prof[g][0] and prof[f][1] != prof[g][1])
    assert rep.separation_pair_count == brute == sum(rep.pairs_by_total_influence.values())
    assert sorted(rep.witness_log2_mu) == [Fraction(-2, 3), Fraction(-1, 2)]
    assert sorted(map(sorted, rep.witness_influences)) == [
        [0, 0, 1], [0, Fraction(1, 2), Fraction(1, 2)]]
    assert rep.breakdown_csv().startswith("total_influence,pairs\n")


def test_separation_breakdown_per_level():
    prof = A.universe_profiles(3)
    tot = prof.numerators.sum(axis=1)
    rep = A.separation_census(3)
    for level, count in rep.pairs_by_total_influence.items():
        members = [f for f in range(256) if Fraction(int(tot[f]), 64) == level]
        pairs = sum(1 for i, f in enumerate(members) for g in members[i + 1:]
                    if prof.log2_mu[f] != prof.log2_mu[g])
        assert pairs == count


def test_bin_key_half_up():
    assert A.bin_key(Fraction(7, 4)) == Fraction(7, 4)
    assert A.bin_key(Fraction(19, 8)) == Fraction(12, 5)     # 2.375 -> 2.40
    assert A.bin_key(Fraction(1, 40)) == Fraction(1, 20)     # exact half rounds up
    assert A.bin_key(Fraction(0)) == 0


def test_format_p():
    assert A.format_p(0.0) == "<1e-300"
    assert A.format_p(1e-301) == "<1e-300"
    assert A.format_p(0.5) == 0.5


def test_spearman_identities(rng):
    x = rng.integers(0, 5, size=200).astype(float)
    assert A.spearman(x, x)[0] == pytest.approx(1.0)
    assert A.spearman(x, -x)[0] == pytest.approx(-1.0)
    with pytest.raises(A.InsufficientVariance):
        A.spearman(np.ones(10), x[:10])


def test_sampler_uniform():
    a = A.sampler("uniform", 5, 50, seed=3)
    assert a == A.sampler("uniform", 5, 50, seed=3)
    assert all(0 <= f < 1 << 32 for f in a)
    small = A.sampler("uniform", 1, 200, seed=0)
    assert set(small) == {0, 1, 2, 3}   # constants included


def test_sampler_npn(tmp_path, monkeypatch):
    uni = enumerate_universe(4)
    s = A.sampler("npn_canonical", 4, 100, seed=1, universe=uni)
    assert len(set(s)) == 100 and all(f in uni for f in s)
    monkeypatch.setenv("BBT_LAB_DATA_DIR", str(tmp_path))
    with pytest.raises(A.UniverseMissing):
        A.sampler("npn_canonical", 4, 10, seed=1)
    uni.save(tmp_path / "npn_n4.txt")
    assert A.sampler("npn_canonical", 4, 100, seed=1) == s
    with pytest.raises(ValueError):
        A.sampler("bogus", 4, 1, seed=1)


def test_stratified_sample():
    s = A.stratified_sample(4, 2000, seed=42)
    assert len(s) == len(set(s)) == 2000
    assert s == A.stratified_sample(4, 2000, seed=42)


def test_correlation_study_n3(n3_census):
    rep = A.correlation_study(n3_census.certificates)
    assert rep.size == 256
    names = [m.diagnostic for m in rep.marginal]
    assert names == list(A.DIAGNOSTICS)
    assert sum(b.size for b in rep.conditional) == 256
    assert all(b.low_power == (b.size < 50) for b in rep.conditional)
    assert rep.marginal_csv().splitlines()[0] == "diagnostic,r,p,rho,p"
    assert rep.conditional_csv().splitlines()[0].startswith("I_bin,bin_size,rho_mu,p,rho_H,p")


def test_correlation_study_rejects_non_optimal(n3_census):
    from dataclasses import replace
    certs = [replace(c, optimal=False) if i == 0 else c
             for i, c in enumerate(n3_census.certificates)]
    with pytest.raises(ValueError):
        A.correlation_study(certs)
