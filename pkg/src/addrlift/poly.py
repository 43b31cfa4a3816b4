"""Sparse multilinear polynomials over ±1 variables with integer ids.

Variable ids are the same integers as truth-table bit positions (id i is
bit i, i.e. variable i+1 of a TruthTable), so a polynomial over ids
``0..n-1`` can be evaluated on a whole truth table with one transform.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

import numpy as np

from .boolfn import (FourierSpectrum, PartialTruthTable, TruthTable, wht_forward,
                     wht_inverse)
from .errors import InvalidInputError, UndefinedQuantityError

PRUNE_TOL = 1e-12

Monomial = frozenset


@dataclass(frozen=True)
class PartialAssignment:
    bindings: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        b = dict(self.bindings)
        for var, v in b.items():
            if v not in (1, -1):
                raise InvalidInputError(f"variable {var} bound to {v!r}, expected ±1")
        object.__setattr__(self, "bindings", b)

    def __or__(self, other: "PartialAssignment") -> "PartialAssignment":
        return PartialAssignment({**self.bindings, **other.bindings})


class MultilinearPolynomial:
    """sum_S coeffs[S] * prod_{i in S} x_i with no stored zero coefficients."""

    __slots__ = ("var_ids", "coeffs")

    def __init__(self, var_ids: Iterable[int], coeffs: Mapping[Iterable[int], float] = ()):
        self.var_ids = tuple(sorted(set(int(v) for v in var_ids)))
        known = set(self.var_ids)
        merged: dict[frozenset, float] = {}
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        for S, c in items:
            key = frozenset(int(v) for v in S)
            if not key <= known:
                raise InvalidInputError(f"monomial {sorted(key)} uses unknown variables")
            merged[key] = merged.get(key, 0.0) + float(c)
        self.coeffs = {S: c for S, c in merged.items() if abs(c) >= PRUNE_TOL}

    def __repr__(self):
        terms = " + ".join(f"{c:g}*x{sorted(S)}" for S, c in sorted(
            self.coeffs.items(), key=lambda t: (len(t[0]), sorted(t[0]))))
        return f"MultilinearPolynomial({terms or '0'})"

    def __eq__(self, other):
        return (isinstance(other, MultilinearPolynomial) and self.var_ids == other.var_ids
                and self.coeffs == other.coeffs)

    def allclose(self, other: "MultilinearPolynomial", tol: float = 1e-12) -> bool:
        keys = set(self.coeffs) | set(other.coeffs)
        return all(abs(self.coeffs.get(S, 0.0) - other.coeffs.get(S, 0.0)) <= tol for S in keys)

    def scaled(self, factor: float) -> "MultilinearPolynomial":
        return MultilinearPolynomial(self.var_ids, {S: factor * c for S, c in self.coeffs.items()})


# --- construction -----------------------------------------------------------

def from_spectrum(spec: FourierSpectrum | np.ndarray, var_ids: Iterable[int] | None = None
                  ) -> MultilinearPolynomial:
    """Polynomial whose coefficient on bitmask S is ``spec[S]``; bit i maps to var_ids[i]."""
    coeffs = spec.coeffs if isinstance(spec, FourierSpectrum) else np.asarray(spec, dtype=float)
    n = coeffs.shape[0].bit_length() - 1
    ids = tuple(range(n)) if var_ids is None else tuple(var_ids)
    if len(ids) != n:
        raise InvalidInputError(f"need {n} variable ids, got {len(ids)}")
    terms = {}
    for mask in np.flatnonzero(np.abs(coeffs) >= PRUNE_TOL):
        terms[frozenset(ids[i] for i in range(n) if (mask >> i) & 1)] = coeffs[mask]
    return MultilinearPolynomial(ids, terms)


def expansion(f: TruthTable) -> MultilinearPolynomial:
    """Exact multilinear expansion of a total function."""
    return from_spectrum(wht_forward(f.values))


def dense_coeffs(p: MultilinearPolynomial, n: int) -> np.ndarray:
    """Length-2^n coefficient vector; requires var_ids within 0..n-1."""
    if p.var_ids and (p.var_ids[0] < 0 or p.var_ids[-1] >= n):
        raise InvalidInputError(f"polynomial variables {p.var_ids} do not fit in {n} bits")
    out = np.zeros(1 << n)
    for S, c in p.coeffs.items():
        out[sum(1 << i for i in S)] += c
    return out


def values_on_cube(p: MultilinearPolynomial, n: int) -> np.ndarray:
    return wht_inverse(FourierSpectrum(n, dense_coeffs(p, n)))


# --- operations -------------------------------------------------------------

def evaluate(p: MultilinearPolynomial, x: Mapping[int, int] | PartialAssignment) -> float:
    bind = x.bindings if isinstance(x, PartialAssignment) else x
    missing = [v for v in p.var_ids if v not in bind]
    if missing:
        raise InvalidInputError(f"unbound variables {missing}")
    total = 0.0
    for S, c in p.coeffs.items():
        sign = 1
        for v in S:
            sign *= bind[v]
        total += sign * c
    return total


def degree(p: MultilinearPolynomial) -> int:
    return max((len(S) for S in p.coeffs), default=0)


def l1_norm(p: MultilinearPolynomial) -> float:
    return float(sum(abs(c) for c in p.coeffs.values()))


def restrict(p: MultilinearPolynomial, a: PartialAssignment | Mapping[int, int]
             ) -> MultilinearPolynomial:
    bind = a.bindings if isinstance(a, PartialAssignment) else dict(a)
    out: dict[frozenset, float] = {}
    for S, c in p.coeffs.items():
        sign = 1
        rest = []
        for v in S:
            if v in bind:
                sign *= bind[v]
            else:
                rest.append(v)
        key = frozenset(rest)
        out[key] = out.get(key, 0.0) + sign * c
    return MultilinearPolynomial([v for v in p.var_ids if v not in bind], out)


def expect_uniform(p: MultilinearPolynomial, V: Iterable[int]) -> MultilinearPolynomial:
    """Average over independent uniform ±1 values of the variables in V.

    A monomial containing any variable of V has zero mean, so this simply
    deletes those monomials.
    """
    V = frozenset(V)
    return MultilinearPolynomial([v for v in p.var_ids if v not in V],
                                 {S: c for S, c in p.coeffs.items() if not S & V})


def drop_monomials(p: MultilinearPolynomial, predicate: Callable[[frozenset], bool]
                   ) -> tuple[MultilinearPolynomial, float]:
    kept, removed = {}, 0.0
    for S, c in p.coeffs.items():
        if predicate(S):
            removed += abs(c)
        else:
            kept[S] = c
    return MultilinearPolynomial(p.var_ids, kept), removed


def rename(p: MultilinearPolynomial, mapping: Mapping[int, int]) -> MultilinearPolynomial:
    ids = [mapping.get(v, v) for v in p.var_ids]
    if len(set(ids)) != len(ids):
        raise InvalidInputError("renaming is not injective")
    return MultilinearPolynomial(ids, {frozenset(mapping.get(v, v) for v in S): c
                                       for S, c in p.coeffs.items()})


def sup_error(p: MultilinearPolynomial, f: TruthTable | PartialTruthTable) -> float:
    """max over promise inputs of |p(x) - f(x)|."""
    mask = f.promise
    if not mask.any():
        raise UndefinedQuantityError("empty promise domain")
    vals = values_on_cube(p, f.n)
    return float(np.max(np.abs(vals[mask] - f.values[mask])))


# --- serialization ----------------------------------------------------------

def to_json(p: MultilinearPolynomial) -> dict:
    terms = sorted(p.coeffs.items(), key=lambda t: (len(t[0]), sorted(t[0])))
    return {"vars": list(p.var_ids),
            "terms": [{"subset": sorted(S), "coeff": c} for S, c in terms]}


def from_json(doc: dict | str) -> MultilinearPolynomial:
    if isinstance(doc, str):
        doc = json.loads(doc)
    try:
        return MultilinearPolynomial(doc["vars"], [(t["subset"], t["coeff"]) for t in doc["terms"]])
    except (KeyError, TypeError) as exc:
        raise InvalidInputError(f"malformed polynomial document: {exc}") from exc
