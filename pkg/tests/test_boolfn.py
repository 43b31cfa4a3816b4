import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from addrlift import boolfn
from addrlift.boolfn import (PartialTruthTable, TruthTable, chi, constant, dictator, dumps,
                             influence, loads, majority, min_entropy, parity, spectral_norm,
                             spectrum, wht_forward, wht_inverse)
from addrlift.errors import InvalidInputError, ResourceLimitError, UndefinedQuantityError

from conftest import brute_coeff


def tables(max_n=6):
    return st.integers(1, max_n).flatmap(
        lambda n: st.lists(st.sampled_from([-1, 1]), min_size=1 << n, max_size=1 << n).map(
            lambda v: TruthTable(n, np.array(v))))


def test_chi_examples():
    assert chi([], (1, -1)) == 1
    assert chi([1, 3], (-1, 1, -1)) == 1
    assert chi([2], (1, -1)) == -1


def test_point_index_round_trip():
    for n in range(5):
        for i in range(1 << n):
            assert boolfn.index_of(boolfn.point(i, n)) == i


def test_dictator_and_constant_spectra():
    s = spectrum(dictator(2, 1))
    assert s[[1]] == 1.0
    assert np.count_nonzero(s.coeffs) == 1
    s = spectrum(constant(3))
    assert s[[]] == 1.0 and np.count_nonzero(s.coeffs) == 1


def test_majority3_spectrum_against_inner_products():
    f = majority(3)
    s = spectrum(f)
    expected = {(): 0, (1,): .5, (2,): .5, (3,): .5, (1, 2): 0, (1, 3): 0, (2, 3): 0, (1, 2, 3): -.5}
    for S, c in expected.items():
        assert brute_coeff(f.values, S, 3) == c
        assert s[S] == pytest.approx(c, abs=1e-15)
    assert np.array_equal(wht_inverse(s), f.values)


def test_majority3_quantities():
    s = spectrum(majority(3))
    assert spectral_norm(s) == pytest.approx(2.0)
    assert min_entropy(s) == pytest.approx(1.0)
    assert influence(s) == pytest.approx(1.5)


@pytest.mark.parametrize("n", [1, 3, 6])
def test_parity_quantities(n):
    s = spectrum(parity(n))
    assert spectral_norm(s) == 1.0
    assert min_entropy(s) == 0.0
    assert influence(s) == n
    assert spectral_norm(spectrum(constant(n, -1))) == 1.0
    assert influence(spectrum(constant(n))) == 0.0


def test_min_entropy_of_zero_spectrum():
    with pytest.raises(UndefinedQuantityError):
        min_entropy(boolfn.FourierSpectrum(2, np.zeros(4)))


def test_constant_spectrum_inverts_to_constant():
    c = np.zeros(8)
    c[0] = 0.25
    assert np.allclose(wht_inverse(boolfn.FourierSpectrum(3, c)), 0.25)


def test_round_trip_ten_bits(rng):
    f = boolfn.random_function(10, rng)
    assert np.max(np.abs(wht_inverse(spectrum(f)) - f.values)) <= 1e-12


def test_transform_guard():
    with pytest.raises(ResourceLimitError):
        boolfn._butterfly(np.zeros(1 << 25, dtype=np.int8))


@given(tables())
def test_parseval_and_round_trip(f):
    s = spectrum(f)
    assert abs(boolfn.fourier_weight(s) - 1.0) <= 1e-10
    assert np.max(np.abs(wht_inverse(s) - f.values)) <= 1e-12


@given(tables(4), st.data())
def test_transform_matches_inner_products(f, data):
    mask = data.draw(st.integers(0, (1 << f.n) - 1))
    S = [i + 1 for i in range(f.n) if mask >> i & 1]
    assert spectrum(f)[mask] == pytest.approx(brute_coeff(f.values, S, f.n), abs=1e-12)


@given(tables(5))
def test_spectral_norm_bounds(f):
    # ||f^||_1 >= max |f^| and >= 1 by Parseval
    s = spectrum(f)
    assert spectral_norm(s) >= 1 - 1e-12
    assert spectral_norm(s) <= math.sqrt(1 << f.n) + 1e-9


@given(tables(5))
def test_file_round_trip(f):
    text = dumps(f)
    assert loads(text) == f
    assert dumps(loads(text)) == text


def test_partial_file_round_trip():
    p = PartialTruthTable(2, np.array([1, 0, -1, 0]))
    text = dumps(p)
    assert '"+*-*"' in text
    q = loads(text)
    assert q == p and q.promise_count == 2 and not q.is_total


@pytest.mark.parametrize("text", [
    "not json",
    '{"version": 2, "n": 1, "kind": "total", "values": "++"}',
    '{"version": 1, "n": 1, "kind": "total", "values": "+"}',
    '{"version": 1, "n": 1, "kind": "total", "values": "+x"}',
    '{"version": 1, "n": 1, "kind": "total", "values": "+*"}',
    '{"version": 1, "n": 1, "kind": "partial", "values": "**"}',
    '{"version": 1, "n": 1, "kind": "odd", "values": "++"}',
])
def test_malformed_files(text):
    with pytest.raises(InvalidInputError):
        loads(text)


def test_invalid_tables():
    with pytest.raises(InvalidInputError):
        TruthTable(2, np.array([1, 1, 1]))
    with pytest.raises(InvalidInputError):
        TruthTable(1, np.array([1, 2]))
    with pytest.raises(InvalidInputError):
        majority(2)


def test_values_are_read_only():
    f = parity(2)
    with pytest.raises(ValueError):
        f.values[0] = -1
