import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bbt_lab.boolean_core import (
    IntegerSpectrum,
    NonIntegerResult,
    TruthTable,
    all_truth_tables,
    apply_hadamard,
    butterfly,
    character_sign,
    fids_to_tables,
    format_fid,
    fwht,
    fwht_inverse,
    hadamard_matrix,
    tables_to_fids,
)

from oracles import dense_hadamard, table


def fids(n):
    return st.integers(0, (1 << (1 << n)) - 1)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_hadamard_matches_dense_definition(n):
    assert np.array_equal(hadamard_matrix(n), dense_hadamard(n))


def test_character_sign_convention():
    # bit j of the index set means x_{j+1} = -1
    assert character_sign(0b101, 0b001) == -1
    assert character_sign(0b101, 0b010) == 1
    assert character_sign(0b111, 0b111) == -1


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_butterfly_equals_dense_product(n, rng):
    w = rng.integers(-5, 6, size=(7, 1 << n))
    assert np.array_equal(butterfly(w), w @ dense_hadamard(n).T)


def test_fid_round_trip_and_encoding():
    f = TruthTable.from_fid(0b0110, 2)
    assert list(f.values) == [1, -1, -1, 1]
    assert f.fid == 6
    assert format_fid(6, 2) == "0x6"
    assert format_fid(0xE8, 3) == "0xe8"
    assert format_fid(0, 4) == "0x0000"


@given(fids(3))
def test_fid_vectorised_paths_agree(fid):
    t = fids_to_tables([fid], 3)[0]
    assert np.array_equal(t, table(fid, 3))
    assert int(tables_to_fids(t[None, :])[0]) == fid


def test_all_truth_tables_rows_are_fids():
    T = all_truth_tables(3)
    assert T.shape == (256, 8)
    assert np.array_equal(tables_to_fids(T), np.arange(256))


@settings(max_examples=60)
@given(fids(4))
def test_inverse_round_trip_and_parseval(fid):
    f = TruthTable.from_fid(fid, 4)
    s = fwht(f)
    assert fwht_inverse(s) == f
    assert s.parseval_sum() == (1 << 4) ** 2


@given(st.integers(1, 5), st.data())
def test_spectrum_parity_of_coefficients(n, data):
    # 2^n fhat(S) is a sum of 2^n odd terms: even for n >= 1
    f = TruthTable.from_fid(data.draw(fids(n)), n)
    assert np.all(fwht(f).coeffs % 2 == 0)


def test_parity_has_single_coefficient():
    f = TruthTable(2, np.array([1, -1, -1, 1]))
    assert list(fwht(f).coeffs) == [0, 0, 0, 4]


def test_fourier_is_exact_fraction():
    s = fwht(TruthTable.from_fid(0xE8, 3))
    assert s.fourier(1) == s.fourier(2) == s.fourier(4)
    assert s.fourier(1) * 2 == 1


def test_inverse_rejects_non_integer():
    with pytest.raises(NonIntegerResult):
        fwht_inverse(IntegerSpectrum(2, np.array([1, 0, 0, 0])))


def test_inverse_returns_integer_vector_when_not_boolean():
    out = fwht_inverse(IntegerSpectrum(1, np.array([4, 0])))
    assert not isinstance(out, TruthTable)
    assert list(out) == [2, 2]


def test_apply_hadamard_is_integer_only():
    with pytest.raises(TypeError):
        apply_hadamard(np.array([0.5, 0.5]))
    assert list(apply_hadamard(np.array([1, 0, 0, -1], dtype=np.int8))) == [0, 2, 2, 0]


@pytest.mark.parametrize("bad", [np.array([1, 0]), np.array([1, -1, 1])])
def test_truth_table_validation(bad):
    with pytest.raises(ValueError):
        TruthTable(1, bad)


def test_truth_table_is_immutable():
    f = TruthTable.from_fid(3, 2)
    with pytest.raises(ValueError):
        f.values[0] = -1
