"""Approximate degree and approximate spectral norm by linear programming.

Both quantities are minima over real polynomials p that stay within eps of f
on the promise inputs; nothing is required of p off the promise.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import poly
from .boolfn import PartialTruthTable, TruthTable, _butterfly, popcounts, spectral_norm, wht_forward
from .errors import InvalidInputError, InvariantViolation, ResourceLimitError
from .ipm import solve_lp_ipm
from .simplex import LPProblem, LPSolution, solve_lp

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Tolerances:
    feasibility: float = 1e-7
    objective: float = 1e-6
    witness: float = 1e-6


TOL = Tolerances()
LP_GUARD_N = 14
# constraint-matrix size above which "auto" uses the interior point method
AUTO_SIMPLEX_MAX_ENTRIES = 1 << 16


@dataclass
class ApproxResult:
    value: float
    witness: poly.MultilinearPolynomial
    epsilon: float
    kind: str  # "degree" or "norm"
    profile: list[tuple[int, float]] = field(default_factory=list)
    lp: LPSolution | None = None

    def to_json(self) -> dict:
        return {"kind": self.kind, "epsilon": self.epsilon,
                "value": int(self.value) if self.kind == "degree" else self.value,
                "witness": poly.to_json(self.witness),
                "profile": [[d, e] for d, e in self.profile]}


def character_matrix(rows: np.ndarray, masks: np.ndarray, n: int) -> np.ndarray:
    """chi_S(x) for x in rows, S in masks (both as index bitmasks)."""
    pc = popcounts(n)
    return np.where(pc[np.bitwise_and.outer(rows, masks)] & 1, -1.0, 1.0)


def _guard(f, guard_n: int):
    if f.n > guard_n:
        raise ResourceLimitError(f"{f.n}-variable LP exceeds guard n <= {guard_n}")


def run_lp(p: LPProblem, backend: str = "auto") -> LPSolution:
    """Solve with the tableau-free simplex or the dense interior point method."""
    if backend == "auto":
        backend = "simplex" if p.A.size <= AUTO_SIMPLEX_MAX_ENTRIES else "ipm"
    if backend == "simplex":
        sol = solve_lp(p)
    elif backend == "ipm":
        sol = solve_lp_ipm(p)
    else:
        raise InvalidInputError(f"unknown LP backend {backend!r}")
    if sol.optimal and sol.primal_violation > 10 * TOL.feasibility:
        raise InvariantViolation(f"LP solution violates constraints by {sol.primal_violation:g}")
    return sol


def _promise(f: TruthTable | PartialTruthTable) -> tuple[np.ndarray, np.ndarray]:
    rows = np.flatnonzero(f.promise)
    return rows, f.values[rows].astype(float)


def degree_dual_lp(f: TruthTable | PartialTruthTable, d: int) -> tuple[LPProblem, np.ndarray, np.ndarray]:
    """max f.psi over weightings psi of the promise with |psi|_1 <= 1 orthogonal to degree <= d.

    Written as min -f.(p - q), p, q >= 0. Its optimum is the best error of a
    degree-d approximant, and the multipliers y of the orthogonality rows give
    that approximant as -y. This has one row per low-degree character instead of
    two per promise input, and no free variables.
    """
    masks = np.flatnonzero(popcounts(f.n) <= d)
    rows, target = _promise(f)
    chi = character_matrix(rows, masks, f.n)
    P = rows.size
    A = np.vstack([np.hstack([chi.T, -chi.T]), np.ones((1, 2 * P))])
    lp = LPProblem(np.r_[-target, target], A, ["="] * masks.size + ["<="],
                   np.r_[np.zeros(masks.size), 1.0])
    return lp, masks, rows


def best_error_at_degree(f: TruthTable | PartialTruthTable, d: int, *, backend: str = "auto",
                         guard_n: int = LP_GUARD_N) -> tuple[float, poly.MultilinearPolynomial]:
    """Smallest eps achievable by a polynomial of degree <= d, with a witness."""
    _guard(f, guard_n)
    if not 0 <= d <= f.n:
        raise InvalidInputError(f"degree {d} outside 0..{f.n}")
    lp, masks, _ = degree_dual_lp(f, d)
    sol = run_lp(lp, backend)
    if not sol.optimal:
        raise InvariantViolation(f"degree-{d} LP ended with status {sol.status}")
    coeffs = np.zeros(1 << f.n)
    coeffs[masks] = -sol.duals[:masks.size]
    witness = poly.from_spectrum(coeffs)
    eps = max(0.0, -sol.objective)
    err = poly.sup_error(witness, f)
    if abs(err - eps) > TOL.witness:
        raise InvariantViolation(f"degree-{d} witness error {err:g} differs from LP optimum {eps:g}")
    return eps, witness


def error_profile(f, max_degree: int | None = None, **kw) -> list[tuple[int, float, poly.MultilinearPolynomial]]:
    top = f.n if max_degree is None else max_degree
    return [(d, *best_error_at_degree(f, d, **kw)) for d in range(top + 1)]


def approx_degree(f: TruthTable | PartialTruthTable, eps: float, *, backend: str = "auto",
                  guard_n: int = LP_GUARD_N) -> ApproxResult:
    """Least d with best_error_at_degree(f, d) <= eps (+ objective tolerance)."""
    if not 0 <= eps:
        raise InvalidInputError("eps must be nonnegative")
    profile = []
    for d in range(f.n + 1):
        err, witness = best_error_at_degree(f, d, backend=backend, guard_n=guard_n)
        profile.append((d, err))
        if err <= eps + TOL.objective:
            return ApproxResult(d, witness, eps, "degree", profile)
    raise InvariantViolation("full-degree LP failed to interpolate f")


def spectral_lp(f: TruthTable | PartialTruthTable, eps: float, rows: np.ndarray | None = None,
                masks: np.ndarray | None = None) -> LPProblem:
    """min sum(a + b) s.t. chi (a - b) - e = f on the rows, a, b >= 0, |e| <= eps.

    Variables are ordered a (one per mask), b (one per mask), e (one per row).
    By default the rows are all promise inputs and the masks all 2^n subsets.
    """
    if rows is None:
        rows = np.flatnonzero(f.promise)
    if masks is None:
        masks = np.arange(1 << f.n)
    target = f.values[rows].astype(float)
    chi = character_matrix(rows, masks, f.n)
    P, K = rows.size, masks.size
    A = np.hstack([chi, -chi, -np.eye(P)])
    c = np.r_[np.ones(2 * K), np.zeros(P)]
    lower = np.r_[np.zeros(2 * K), np.full(P, -eps)]
    upper = np.r_[np.full(2 * K, np.inf), np.full(P, eps)]
    return LPProblem(c, A, ["="] * P, target, lower, upper)


def _split_coeffs(x: np.ndarray, K: int) -> np.ndarray:
    a, b = x[:K], x[K:2 * K]
    both = float(np.max(np.minimum(a, b), initial=0.0))
    if both > TOL.feasibility:
        # never optimal: shrinking both parts keeps feasibility and lowers the cost
        raise InvariantViolation(f"split coefficients both positive (min part {both:g})")
    return a - b


def approx_spectral_norm(f: TruthTable | PartialTruthTable, eps: float, *, backend: str = "auto",
                         guard_n: int = LP_GUARD_N) -> ApproxResult:
    """Least l1 coefficient mass of a polynomial within eps of f on the promise."""
    _guard(f, guard_n)
    if eps < 0:
        raise InvalidInputError("eps must be nonnegative")
    sol = run_lp(spectral_lp(f, eps), backend)
    if not sol.optimal:
        raise InvariantViolation(f"spectral-norm LP ended with status {sol.status}")
    coeffs = _split_coeffs(sol.x, 1 << f.n)
    return ApproxResult(sol.objective, poly.from_spectrum(coeffs), eps, "norm", lp=sol)


def dual_lower_bound(f: TruthTable | PartialTruthTable, eps: float, psi: np.ndarray) -> float:
    """Weak-duality lower bound on the eps-approximate spectral norm.

    ``psi`` weights the promise inputs (in promise order). After scaling so that
    every character correlates with it by at most 1, sum psi*f - eps*|psi|_1
    bounds the norm from below, whatever solver produced psi.
    """
    rows = np.flatnonzero(f.promise)
    y = np.zeros(1 << f.n)
    y[rows] = psi
    top = float(np.abs(_butterfly(y)).max())
    if top > 1.0:
        y /= top
    return float(y[rows] @ f.values[rows] - eps * np.abs(y[rows]).sum())


def check_witness(res: ApproxResult, f, tol: float = TOL.witness) -> None:
    """Re-derive the defining constraints of a result from its witness alone."""
    err = poly.sup_error(res.witness, f)
    if err > res.epsilon + tol:
        raise InvariantViolation(f"witness error {err:g} exceeds eps {res.epsilon:g}")
    if res.kind == "degree" and poly.degree(res.witness) > res.value:
        raise InvariantViolation("witness degree exceeds reported degree")
    if res.kind == "norm" and abs(poly.l1_norm(res.witness) - res.value) > tol:
        raise InvariantViolation("witness l1 norm differs from reported value")


@dataclass
class CSReport:
    n: int
    approx_degree: int
    approx_norm: float
    bound: float
    holds: bool

    @property
    def log2_norm(self) -> float:
        return math.log2(self.approx_norm)

    @property
    def log2_bound(self) -> float:
        return math.log2(self.bound)


def cs_bound(n: int, d: int) -> float:
    """(4/3) (n+1)^(d/2): l1 mass of any degree-d polynomial bounded by 4/3 on the cube."""
    return 4.0 / 3.0 * (n + 1) ** (d / 2)


def certify_cs_upper_bound(f: TruthTable, *, backend: str = "auto") -> CSReport:
    if not isinstance(f, TruthTable):
        raise InvalidInputError("the Cauchy-Schwarz certificate needs a total function")
    if f.n > 12:
        raise ResourceLimitError("certificate limited to n <= 12")
    d = int(approx_degree(f, 1 / 3, backend=backend).value)
    norm = approx_spectral_norm(f, 1 / 3, backend=backend).value
    bound = cs_bound(f.n, d)
    return CSReport(f.n, d, norm, bound, norm <= bound + TOL.objective)


def exact_norm_upper_bound(f: TruthTable) -> float:
    """||f^||_1; the exact expansion is feasible for every eps."""
    return spectral_norm(wht_forward(f.values))
