import itertools
import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from addrlift import poly
from addrlift.boolfn import majority, parity, random_function, TruthTable
from addrlift.errors import InvalidInputError, UndefinedQuantityError
from addrlift.poly import MultilinearPolynomial as MP, PartialAssignment


@st.composite
def polys(draw, n=6):
    masks = draw(st.lists(st.integers(0, (1 << n) - 1), max_size=12))
    coeffs = draw(st.lists(st.floats(-3, 3, allow_nan=False), min_size=len(masks), max_size=len(masks)))
    terms = [([i for i in range(n) if m >> i & 1], c) for m, c in zip(masks, coeffs)]
    return MP(range(n), terms)


def test_evaluate_examples():
    assert poly.evaluate(MP([0], {(): .5, (0,): .5}), {0: 1}) == 1.0
    assert poly.evaluate(MP([0, 1], {(0, 1): 1}), {0: -1, 1: -1}) == 1.0
    p = poly.expansion(majority(3))
    assert poly.evaluate(p, {0: -1, 1: -1, 2: 1}) == pytest.approx(-1)


def test_evaluate_needs_all_variables():
    with pytest.raises(InvalidInputError):
        poly.evaluate(MP([0, 1], {(0,): 1}), {0: 1})


def test_degree_and_norm():
    p = MP([0, 1], {(): 3, (0, 1): -2})
    assert poly.degree(p) == 2 and poly.l1_norm(p) == 5
    z = MP([0, 1])
    assert poly.degree(z) == 0 and poly.l1_norm(z) == 0
    e = poly.expansion(parity(4))
    assert poly.degree(e) == 4 and poly.l1_norm(e) == pytest.approx(1)


def test_restrict_examples():
    p = MP([0, 1], {(0, 1): 1, (1,): 1})
    assert poly.restrict(p, {0: -1}).coeffs == {}
    q = poly.restrict(MP([0, 1], {(0, 1): 1}), PartialAssignment({0: 1}))
    assert q == MP([1], {(1,): 1})


def test_expect_uniform_examples():
    assert poly.expect_uniform(MP([0, 1], {(0,): 1, (1,): 1}), [0]) == MP([1], {(1,): 1})
    p = MP([0, 1], {(): 2, (1,): 1})
    assert poly.expect_uniform(p, [0]).coeffs == p.coeffs


def test_drop_examples():
    p = MP([0, 1], {(): 3, (0, 1): -2})
    q, mass = poly.drop_monomials(p, lambda S: False)
    assert q == p and mass == 0
    q, mass = poly.drop_monomials(p, lambda S: len(S) >= 1)
    assert q.coeffs == {frozenset(): 3} and mass == 2


def test_sup_error_examples():
    f = parity(3)
    assert poly.sup_error(poly.expansion(f), f) == pytest.approx(0, abs=1e-12)
    assert poly.sup_error(MP(range(3)), f) == 1
    assert poly.sup_error(poly.expansion(f).scaled(1 - .3), f) == pytest.approx(.3)


def test_rename():
    p = MP([3, 5], {(3, 5): 2})
    assert poly.rename(p, {3: 0, 5: 1}) == MP([0, 1], {(0, 1): 2})
    with pytest.raises(InvalidInputError):
        poly.rename(p, {3: 5})


def test_unknown_variable_and_bad_binding():
    with pytest.raises(InvalidInputError):
        MP([0], {(1,): 1})
    with pytest.raises(InvalidInputError):
        PartialAssignment({0: 0})


@given(polys(), st.lists(st.sampled_from([-1, 1]), min_size=6, max_size=6),
       st.sets(st.integers(0, 5), max_size=6))
def test_restrict_agrees_with_evaluation(p, x, bound):
    a = {v: x[v] for v in bound}
    rest = {v: x[v] for v in range(6) if v not in bound}
    assert poly.evaluate(poly.restrict(p, a), rest) == pytest.approx(poly.evaluate(p, dict(enumerate(x))), abs=1e-9)


def test_restrict_random_eight_vars(rng):
    p = poly.from_spectrum(rng.normal(size=256))
    a = {0: 1, 2: -1, 5: -1, 7: 1}
    r = poly.restrict(p, a)
    for bits in itertools.product([1, -1], repeat=4):
        full = dict(a) | dict(zip([1, 3, 4, 6], bits))
        assert abs(poly.evaluate(r, dict(zip([1, 3, 4, 6], bits))) - poly.evaluate(p, full)) <= 1e-12


@given(polys(5), st.sets(st.integers(0, 4), max_size=5))
def test_expectation_is_average_of_restrictions(p, V):
    V = sorted(V)
    acc = {}
    for bits in itertools.product([1, -1], repeat=len(V)):
        for S, c in poly.restrict(p, dict(zip(V, bits))).coeffs.items():
            acc[S] = acc.get(S, 0.0) + c / 2 ** len(V)
    avg = MP([v for v in range(5) if v not in V], acc)
    assert poly.expect_uniform(p, V).allclose(avg, 1e-12)


@given(polys())
def test_drop_mass_matches_filter(p):
    pred = lambda S: len(S) >= 2 and 0 in S
    q, mass = poly.drop_monomials(p, pred)
    assert mass == pytest.approx(sum(abs(c) for S, c in p.coeffs.items() if pred(S)))
    assert poly.l1_norm(q) + mass == pytest.approx(poly.l1_norm(p))


@given(polys())
def test_json_round_trip(p):
    doc = poly.to_json(p)
    q = poly.from_json(json.dumps(doc))
    assert q == p
    assert poly.to_json(q) == doc


def test_from_json_errors():
    with pytest.raises(InvalidInputError):
        poly.from_json('{"vars": [0]}')
    with pytest.raises(InvalidInputError):
        poly.from_json({"vars": [0], "terms": [{"subset": [4], "coeff": 1}]})


def test_expansion_reproduces_table(rng):
    f = random_function(7, rng)
    assert np.allclose(poly.values_on_cube(poly.expansion(f), 7), f.values)


def test_sup_error_on_partial_only_counts_promise():
    from addrlift.boolfn import PartialTruthTable
    f = PartialTruthTable(1, np.array([1, 0]))
    assert poly.sup_error(MP([0], {(): 1}), f) == 0.0
