import itertools

import numpy as np
import pytest
from scipy.optimize import linprog

from addrlift.errors import InvalidInputError
from addrlift.ipm import solve_lp_ipm
from addrlift.simplex import LPProblem, primal_violation, solve_lp


def vertex_oracle(c, A, b):
    """min c.x s.t. A x <= b, x >= 0 by enumerating every basic solution.

    Returns None when infeasible. Only used on bounded instances.
    """
    m, n = A.shape
    G = np.vstack([A, -np.eye(n)])
    h = np.r_[b, np.zeros(n)]
    best = None
    for rows in itertools.combinations(range(m + n), n):
        M = G[list(rows)]
        if abs(np.linalg.det(M)) < 1e-10:
            continue
        x = np.linalg.solve(M, h[list(rows)])
        if np.all(G @ x <= h + 1e-9):
            val = c @ x
            best = val if best is None else min(best, val)
    return best


def random_bounded_lp(rng, n, m):
    A = rng.integers(-3, 4, size=(m, n)).astype(float)
    b = rng.integers(-2, 6, size=m).astype(float)
    # a box row keeps every instance bounded
    A = np.vstack([A, np.ones(n)])
    b = np.r_[b, 10.0]
    c = rng.integers(-4, 5, size=n).astype(float)
    return c, A, b


def test_trivial_examples():
    sol = solve_lp(LPProblem([1.0], [[1.0]], [">="], [3.0]))
    assert sol.optimal and sol.objective == pytest.approx(3)
    sol = solve_lp(LPProblem([0.0], [[1.0], [1.0]], ["<=", ">="], [-1.0, 1.0], [-np.inf], [np.inf]))
    assert sol.status == "infeasible"
    sol = solve_lp(LPProblem([-1.0], [[0.0]], ["<="], [0.0]))
    assert sol.status == "unbounded"


@pytest.mark.parametrize("rule", ["bland", "hybrid"])
def test_against_vertex_enumeration(rule):
    rng = np.random.default_rng(7)
    for _ in range(60):
        n, m = int(rng.integers(1, 6)), int(rng.integers(1, 7))
        c, A, b = random_bounded_lp(rng, n, m)
        expect = vertex_oracle(c, A, b)
        sol = solve_lp(LPProblem(c, A, ["<="] * len(b), b), rule=rule)
        if expect is None:
            assert sol.status == "infeasible"
        else:
            assert sol.optimal
            assert sol.objective == pytest.approx(expect, abs=1e-6)
            assert primal_violation(LPProblem(c, A, ["<="] * len(b), b), sol.x) <= 1e-7


def test_general_forms_against_highs():
    rng = np.random.default_rng(11)
    for _ in range(150):
        n, m = int(rng.integers(1, 9)), int(rng.integers(1, 9))
        A = rng.normal(size=(m, n)).round(1)
        b = rng.normal(size=m).round(1)
        c = rng.normal(size=n).round(1)
        senses = list(rng.choice(["<=", "=", ">="], size=m))
        lo = np.where(rng.random(n) < 0.3, -np.inf, rng.integers(-3, 1, size=n))
        base = np.where(np.isinf(lo), 0.0, lo)
        hi = np.where(rng.random(n) < 0.5, np.inf, base + rng.integers(0, 4, size=n))
        ub_rows = [i for i, s in enumerate(senses) if s != "="]
        A_ub = np.array([A[i] * (1 if senses[i] == "<=" else -1) for i in ub_rows]).reshape(-1, n)
        b_ub = np.array([b[i] * (1 if senses[i] == "<=" else -1) for i in ub_rows])
        eq = [i for i, s in enumerate(senses) if s == "="]
        ref = linprog(c, A_ub=A_ub if len(ub_rows) else None, b_ub=b_ub if len(ub_rows) else None,
                      A_eq=A[eq] if eq else None, b_eq=b[eq] if eq else None,
                      bounds=list(zip(lo, hi)), method="highs")
        sol = solve_lp(LPProblem(c, A, senses, b, lo, hi))
        status = {0: "optimal", 2: "infeasible", 3: "unbounded"}[ref.status]
        assert sol.status == status
        if status == "optimal":
            assert sol.objective == pytest.approx(ref.fun, abs=1e-6)


def test_ipm_matches_simplex_on_feasible_bounded():
    rng = np.random.default_rng(3)
    for _ in range(40):
        n, m = int(rng.integers(2, 8)), int(rng.integers(1, 6))
        c, A, b = random_bounded_lp(rng, n, m)
        b = np.abs(b) + 1  # x = 0 is feasible
        p = LPProblem(c, A, ["<="] * len(b), b)
        s1, s2 = solve_lp(p), solve_lp_ipm(p)
        assert s1.optimal and s2.optimal
        assert s2.objective == pytest.approx(s1.objective, abs=1e-6)


def test_duals_certify_optimum():
    # max x + y s.t. x + 2y <= 4, 3x + y <= 6
    p = LPProblem([-1.0, -1.0], [[1, 2], [3, 1]], ["<=", "<="], [4.0, 6.0])
    sol = solve_lp(p)
    assert sol.objective == pytest.approx(-2.8)
    assert sol.duals @ p.rhs == pytest.approx(sol.objective)


def test_degenerate_cycling_example():
    # Beale's example cycles under naive largest-coefficient pricing
    c = np.array([-0.75, 150, -0.02, 6])
    A = np.array([[0.25, -60, -0.04, 9], [0.5, -90, -0.02, 3], [0, 0, 1, 0]])
    b = np.array([0, 0, 1.0])
    for rule in ("bland", "hybrid"):
        sol = solve_lp(LPProblem(c, A, ["<="] * 3, b), rule=rule)
        assert sol.optimal and sol.objective == pytest.approx(-0.05)


def test_bad_problems():
    with pytest.raises(InvalidInputError):
        LPProblem([1.0], [[1.0]], ["<"], [1.0])
    with pytest.raises(InvalidInputError):
        LPProblem([1.0], [[1.0]], ["<="], [1.0, 2.0])
    with pytest.raises(InvalidInputError):
        LPProblem([1.0], [[1.0]], ["<="], [1.0], [2.0], [1.0])
    with pytest.raises(InvalidInputError):
        solve_lp(LPProblem([1.0], [[1.0]], ["<="], [1.0]), rule="steepest")
