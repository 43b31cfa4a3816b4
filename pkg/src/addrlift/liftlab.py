"""Restrictions of composed functions by address assignments.

A sample fixes every address variable to a string that selects a target, so
the restricted composition is the outer function on the selected targets. A
monomial over target variables is relevant for a sample when every variable
in it is selected. Probabilities are exact Fractions.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import poly
from .approxlp import approx_degree, approx_spectral_norm, LP_GUARD_N
from .boolfn import TruthTable, parity, point
from .constructions import AddressingFunction, BlockLayout, compose, make_hadd, partial_F
from .errors import InvalidInputError, InvariantViolation, ResourceLimitError

log = logging.getLogger(__name__)

ENUM_GUARD = 10**6
ERROR_SLACK = 1e-8


@dataclass(frozen=True)
class RestrictionSample:
    assignment: poly.PartialAssignment
    selected: tuple[int, ...]  # per block, 1-based target index
    probability: Fraction

    def selected_ids(self, layout: BlockLayout) -> tuple[int, ...]:
        return tuple(layout.target_id(i, j) for i, j in enumerate(self.selected))


def _layout(A: AddressingFunction, blocks: int) -> BlockLayout:
    return BlockLayout(blocks, A.m, A.k)


def support_size(A: AddressingFunction, blocks: int) -> int:
    return A.support.size ** blocks


def mu_support(A: AddressingFunction, blocks: int, guard: int = ENUM_GUARD) -> list[RestrictionSample]:
    """Every product of per-block non-STAR address strings, uniform within a block."""
    if blocks < 1:
        raise InvalidInputError("need at least one block")
    if support_size(A, blocks) > guard:
        raise ResourceLimitError(f"{support_size(A, blocks)} restriction samples exceed guard {guard}")
    layout = _layout(A, blocks)
    per_block = [int(a) for a in A.support]
    p = Fraction(1, len(per_block)) ** blocks
    out = []
    for combo in itertools.product(per_block, repeat=blocks):
        bind = {}
        for i, a in enumerate(combo):
            bind.update(zip(layout.address_ids(i), point(a, A.m)))
        out.append(RestrictionSample(poly.PartialAssignment(bind),
                                     tuple(int(A.selector[a]) for a in combo), p))
    return out


def selection_probability(A: AddressingFunction, j: int) -> Fraction:
    if not 1 <= j <= A.k:
        raise InvalidInputError(f"target index {j} outside 1..{A.k}")
    sup = A.selector[A.support]
    return Fraction(int((sup == j).sum()), int(sup.size))


def is_uniform(A: AddressingFunction) -> bool:
    """True when every target is selected by equally many supported addresses."""
    return len({selection_probability(A, j) for j in range(1, A.k + 1)}) == 1


def _targets_by_block(S, layout: BlockLayout) -> dict[int, list[int]]:
    by_block: dict[int, list[int]] = {}
    for v in S:
        if not 0 <= v < layout.n_vars or not layout.is_target(v):
            raise InvalidInputError(f"variable {v} is not a target variable")
        by_block.setdefault(layout.block_of(v), []).append(v)
    return by_block


def relevance_probability(S, A: AddressingFunction, layout: BlockLayout) -> Fraction:
    """Probability over the samples that every variable of S is selected."""
    out = Fraction(1)
    for vs in _targets_by_block(S, layout).values():
        if len(vs) > 1:
            return Fraction(0)
        out *= selection_probability(A, layout.target_index(vs[0]))
    return out


def relevance_by_enumeration(S, A: AddressingFunction, layout: BlockLayout,
                             samples: list[RestrictionSample] | None = None) -> Fraction:
    _targets_by_block(S, layout)
    samples = samples if samples is not None else mu_support(A, layout.blocks)
    S = frozenset(S)
    return sum((s.probability for s in samples if S <= set(s.selected_ids(layout))), Fraction(0))


def _relevant_high_mass(P1: poly.MultilinearPolynomial, selected: frozenset, D: int) -> float:
    return float(sum(abs(c) for S, c in P1.coeffs.items() if len(S) >= D and S <= selected))


@dataclass
class RelevantMass:
    expectation: float
    analytic_bound: float
    per_sample: list[float]

    @property
    def minimum(self) -> float:
        return min(self.per_sample)


def expected_relevant_mass(P: poly.MultilinearPolynomial, A: AddressingFunction,
                           layout: BlockLayout, D: int, samples=None) -> RelevantMass:
    """E over samples of the l1 mass of relevant monomials of degree >= D after restriction.

    The analytic bound charges every original monomial whose target part has
    size >= D with |w| times the relevance probability of that target part.
    """
    samples = samples if samples is not None else mu_support(A, layout.blocks)
    per_sample = []
    expectation = 0.0
    for s in samples:
        mass = _relevant_high_mass(poly.restrict(P, s.assignment), frozenset(s.selected_ids(layout)), D)
        per_sample.append(mass)
        expectation += float(s.probability) * mass
    bound = 0.0
    for S, c in P.coeffs.items():
        T = [v for v in S if layout.is_target(v)]
        if len(T) >= D:
            bound += abs(c) * float(relevance_probability(T, A, layout))
    return RelevantMass(expectation, bound, per_sample)


@dataclass
class PipelineResult:
    chosen: tuple[int, ...]
    dropped_mass: float
    final_degree: int
    input_error: float
    final_error: float
    polynomial: poly.MultilinearPolynomial
    mass: RelevantMass

    def to_json(self) -> dict:
        return {"chosen_z": list(self.chosen), "dropped_mass": self.dropped_mass,
                "final_degree": self.final_degree, "input_error": self.input_error,
                "final_error": self.final_error}


def degree_reduction_pipeline(P: poly.MultilinearPolynomial, A: AddressingFunction,
                              layout: BlockLayout, f: TruthTable, D: int,
                              eps_in: float) -> PipelineResult:
    """Restrict at the cheapest sample, drop relevant high-degree terms, average out the rest."""
    if layout != _layout(A, f.n):
        raise InvalidInputError("layout does not match the addressing function and outer arity")
    F, _ = compose(f, A)
    err_in = poly.sup_error(P, F)
    if err_in > eps_in + ERROR_SLACK:
        raise InvalidInputError(f"polynomial error {err_in:g} exceeds stated eps {eps_in:g}")
    samples = mu_support(A, layout.blocks)
    mass = expected_relevant_mass(P, A, layout, D, samples)
    # first minimiser in enumeration order
    best = min(range(len(samples)), key=lambda i: mass.per_sample[i])
    z = samples[best]
    if mass.per_sample[best] > mass.expectation + ERROR_SLACK:
        raise InvariantViolation("no sample at or below the expected relevant mass")
    if mass.expectation > mass.analytic_bound + ERROR_SLACK:
        raise InvariantViolation("expected relevant mass exceeds its analytic bound")

    selected = z.selected_ids(layout)
    sel_set = frozenset(selected)
    P1 = poly.restrict(P, z.assignment)
    P2, dropped = poly.drop_monomials(P1, lambda S: len(S) >= D and S <= sel_set)
    P3 = poly.expect_uniform(P2, [v for v in layout.all_target_ids() if v not in sel_set])
    P3 = poly.rename(P3, {v: i for i, v in enumerate(selected)})

    final_degree = poly.degree(P3)
    if final_degree >= D:
        raise InvariantViolation(f"pipeline left degree {final_degree} >= {D}")
    final_error = poly.sup_error(_over(P3, f.n), f)
    if final_error > err_in + dropped + ERROR_SLACK:
        raise InvariantViolation(f"error {final_error:g} exceeds {err_in:g} + dropped {dropped:g}")
    return PipelineResult(tuple(int(a) for a in z.selected), dropped, final_degree, err_in,
                          final_error, P3, mass)


def _over(p: poly.MultilinearPolynomial, n: int) -> poly.MultilinearPolynomial:
    """p viewed over variables 0..n-1 (constants may have lost their variable list)."""
    return poly.MultilinearPolynomial(range(n), p.coeffs)


@dataclass
class LiftReport:
    l: int
    k: int
    D: int
    t: int
    lp_norm: float
    lp_log2_norm: float
    proof_floor: float
    holds: bool
    uniform_addressing: bool
    pipeline: PipelineResult | None = None
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"l": self.l, "k": self.k, "D": self.D, "t": self.t, "lp_norm": self.lp_norm,
                "lp_log2_norm": self.lp_log2_norm, "proof_floor": self.proof_floor,
                "holds": self.holds, "uniform_addressing": self.uniform_addressing,
                "pipeline": None if self.pipeline is None else self.pipeline.to_json(),
                "notes": list(self.notes)}


def lift_bound_check(l: int, k: int, *, eps: float = 1 / 3, eps_degree: float = 0.99,
                      backend: str = "auto", guard_n: int = LP_GUARD_N) -> LiftReport:
    """LP norm of the uncompleted composition against (D/10) log2 l, plus the pipeline on its witness."""
    outer = parity(k // 2)
    D = int(approx_degree(outer, eps_degree).value)
    F, layout = partial_F(l, k)
    res = approx_spectral_norm(F, eps, backend=backend, guard_n=guard_n)
    lp_log2 = math.log2(res.value)
    floor = D / 10 * math.log2(l)
    A = make_hadd(l)
    report = LiftReport(l, k, D, l, res.value, lp_log2, floor, lp_log2 >= floor, is_uniform(A))
    report.pipeline = degree_reduction_pipeline(res.witness, A, layout, outer, D,
                                                eps + 1e-6)
    if not report.uniform_addressing:
        report.notes.append("addressing function selects targets non-uniformly")
    log.info("lift check l=%d k=%d: log2 norm %.6f vs floor %.6f", l, k, lp_log2, floor)
    return report
