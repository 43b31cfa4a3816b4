"""Two-phase revised simplex with bounded variables and Bland's pivoting rule.

Dense explicit basis inverse with rank-1 (eta) updates and periodic
refactorisation. Slack and artificial columns are unit vectors and are never
stored. Deterministic for a fixed input.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg.blas import dger

from .errors import InvalidInputError

log = logging.getLogger(__name__)

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-7
MAX_PIVOTS = 10**6
REFACTOR_EVERY = 64
DEGENERATE_STALL = 50
TIE_TOL = 1e-12
REL_PIVOT_TOL = 1e-7
HARRIS_TOL = 1e-9

SENSES = ("<=", "=", ">=")


@dataclass
class LPProblem:
    """minimize objective @ x  s.t.  A x (sense) rhs,  lower <= x <= upper."""

    objective: np.ndarray
    A: np.ndarray
    senses: list[str]
    rhs: np.ndarray
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        n = self.objective.shape[0]
        self.A = np.asarray(self.A, dtype=float).reshape(-1, n)
        self.rhs = np.asarray(self.rhs, dtype=float).reshape(-1)
        self.senses = list(self.senses)
        m = self.A.shape[0]
        if self.rhs.shape[0] != m or len(self.senses) != m:
            raise InvalidInputError("A, rhs and senses disagree on the number of rows")
        if any(s not in SENSES for s in self.senses):
            raise InvalidInputError(f"senses must be drawn from {SENSES}")
        if not np.all(np.isfinite(self.rhs)) or not np.all(np.isfinite(self.A)):
            raise InvalidInputError("constraint data must be finite")
        self.lower = np.zeros(n) if self.lower is None else np.asarray(self.lower, dtype=float)
        self.upper = np.full(n, np.inf) if self.upper is None else np.asarray(self.upper, dtype=float)
        if self.lower.shape != (n,) or self.upper.shape != (n,):
            raise InvalidInputError("bounds must have one entry per variable")
        if np.any(self.lower > self.upper) or np.any(self.lower == np.inf) or np.any(self.upper == -np.inf):
            raise InvalidInputError("inconsistent variable bounds")

    @property
    def shape(self) -> tuple[int, int]:
        return self.A.shape


@dataclass
class LPSolution:
    status: str  # optimal | infeasible | unbounded | iteration-limit
    objective: float = float("nan")
    x: np.ndarray = field(default_factory=lambda: np.zeros(0))
    primal_violation: float = float("nan")
    dual_violation: float = float("nan")
    pivots: int = 0
    duals: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


class _Standard:
    """min c.x, A_s x_s + U x_u = b, 0 <= x <= u; U holds signed unit columns."""

    def __init__(self, p: LPProblem):
        m, n = p.shape
        cols, costs, ubs, self.back = [], [], [], []
        b = p.rhs.copy()
        self.offset = 0.0
        for j in range(n):
            lo, hi, a, c = p.lower[j], p.upper[j], p.A[:, j], p.objective[j]
            if np.isfinite(lo):
                b -= a * lo
                self.offset += c * lo
                self.back.append((j, len(cols), 1.0, lo))
                cols.append(a); costs.append(c); ubs.append(hi - lo)
            elif np.isfinite(hi):
                b -= a * hi
                self.offset += c * hi
                self.back.append((j, len(cols), -1.0, hi))
                cols.append(-a); costs.append(-c); ubs.append(np.inf)
            else:
                self.back.append((j, len(cols), 1.0, 0.0))
                self.back.append((j, len(cols) + 1, -1.0, 0.0))
                cols.append(a); costs.append(c); ubs.append(np.inf)
                cols.append(-a); costs.append(-c); ubs.append(np.inf)
        self.n_struct = len(cols)
        self.As = np.array(cols, dtype=float).T.reshape(m, self.n_struct)
        # unit columns: slacks then artificials, (row, sign)
        unit_rows, unit_signs = [], []
        for i, s in enumerate(p.senses):
            if s != "=":
                unit_rows.append(i); unit_signs.append(1.0 if s == "<=" else -1.0)
                costs.append(0.0); ubs.append(np.inf)
        self.n_slack = len(unit_rows)
        self.flip = flip = np.where(b < 0, -1.0, 1.0)
        self.As *= flip[:, None]
        b *= flip
        unit_signs = [sg * flip[r] for r, sg in zip(unit_rows, unit_signs)]
        self.art_start = self.n_struct + self.n_slack
        unit_rows += list(range(m))
        unit_signs += [1.0] * m
        costs += [0.0] * m
        ubs += [np.inf] * m
        self.unit_rows = np.array(unit_rows, dtype=np.int64)
        self.unit_signs = np.array(unit_signs)
        self.c = np.array(costs)
        self.u = np.array(ubs)
        self.b = b
        self.m = m
        self.N = self.n_struct + len(unit_rows)

    def column(self, j: int) -> np.ndarray:
        if j < self.n_struct:
            return self.As[:, j]
        col = np.zeros(self.m)
        col[self.unit_rows[j - self.n_struct]] = self.unit_signs[j - self.n_struct]
        return col

    def times(self, x: np.ndarray) -> np.ndarray:
        out = self.As @ x[: self.n_struct]
        np.add.at(out, self.unit_rows, self.unit_signs * x[self.n_struct:])
        return out

    def reduced_costs(self, cost: np.ndarray, y: np.ndarray) -> np.ndarray:
        d = cost.copy()
        d[: self.n_struct] -= y @ self.As
        d[self.n_struct:] -= self.unit_signs * y[self.unit_rows]
        return d

    def recover(self, x: np.ndarray, n: int) -> np.ndarray:
        out = np.zeros(n)
        for j, k, sign, shift in self.back:
            out[j] += sign * x[k] + shift
        return out


class _Simplex:
    def __init__(self, std: _Standard, max_pivots: int, rule: str):
        self.s = std
        self.rule = rule
        self.degenerate_run = 0
        self.max_pivots = max_pivots
        m = std.m
        self.basis = np.arange(std.art_start, std.art_start + m)
        self.in_basis = np.full(std.N, -1, dtype=np.int64)
        self.in_basis[self.basis] = np.arange(m)
        self.at_upper = np.zeros(std.N, dtype=bool)
        self.x = np.zeros(std.N)
        self.x[self.basis] = std.b
        self.Binv = np.asfortranarray(np.eye(m))
        self.pivots = 0
        self.since_refactor = 0
        self.banned = np.zeros(std.N, dtype=bool)

    def refactor(self):
        s = self.s
        B = np.column_stack([s.column(j) for j in self.basis]) if s.m else np.zeros((0, 0))
        self.Binv = np.asfortranarray(np.linalg.inv(B))
        xn = self.x.copy()
        xn[self.basis] = 0.0
        self.x[self.basis] = self.Binv @ (s.b - s.times(xn))
        self.since_refactor = 0

    def run(self, cost: np.ndarray) -> str:
        s = self.s
        u = s.u
        while True:
            if self.pivots >= self.max_pivots:
                return "iteration-limit"
            y = cost[self.basis] @ self.Binv
            d = s.reduced_costs(cost, y)
            nonbasic = self.in_basis < 0
            eligible = nonbasic & ~self.banned & (
                (~self.at_upper & (d < -FEAS_TOL)) | (self.at_upper & (d > FEAS_TOL)))
            cand = np.flatnonzero(eligible)
            if cand.size == 0:
                return "optimal"
            bland = self.rule == "bland" or self.degenerate_run >= DEGENERATE_STALL
            if bland:
                j = int(cand[0])  # lowest index
            else:
                j = int(cand[np.argmax(np.abs(d[cand]))])
            sigma = -1.0 if self.at_upper[j] else 1.0
            alpha = self.Binv @ s.column(j)
            xb = self.x[self.basis]
            ub = u[self.basis]
            sa = sigma * alpha
            theta, leave, leave_var, to_upper = u[j], -1, j, None
            # pivots much smaller than the column's largest entry are refused
            ptol = max(PIVOT_TOL, REL_PIVOT_TOL * float(np.abs(alpha).max(initial=0.0)))
            dec = sa > ptol
            inc = (sa < -ptol) & np.isfinite(ub)
            if s.m and (dec.any() or inc.any()):
                ratios = np.full(s.m, np.inf)
                ratios[dec] = np.maximum(xb[dec], 0.0) / sa[dec]
                ratios[inc] = np.maximum(ub[inc] - xb[inc], 0.0) / -sa[inc]
                if bland:
                    best = ratios.min()
                    ties = np.flatnonzero(ratios <= best + TIE_TOL)
                    r = int(ties[np.argmin(self.basis[ties])])
                else:
                    # Harris: bound the step with relaxed ratios, then take the largest pivot
                    relaxed = np.full(s.m, np.inf)
                    relaxed[dec] = (np.maximum(xb[dec], 0.0) + HARRIS_TOL) / sa[dec]
                    relaxed[inc] = (np.maximum(ub[inc] - xb[inc], 0.0) + HARRIS_TOL) / -sa[inc]
                    cap = relaxed.min()
                    ties = np.flatnonzero(ratios <= cap)
                    r = int(ties[np.argmax(np.abs(sa[ties]))])
                if ratios[r] <= theta and (ratios[r] < theta - TIE_TOL or self.basis[r] < j):
                    theta, leave, leave_var = ratios[r], r, int(self.basis[r])
                    to_upper = bool(inc[r])
            if not np.isfinite(theta):
                return "unbounded"
            self.degenerate_run = self.degenerate_run + 1 if theta <= 1e-12 else 0
            self.x[self.basis] = xb - theta * sa
            self.x[j] += sigma * theta
            self.pivots += 1
            if leave < 0:
                self.at_upper[j] = not self.at_upper[j]
                continue
            self.x[leave_var] = u[leave_var] if to_upper else 0.0
            self.at_upper[leave_var] = to_upper
            self.at_upper[j] = False
            self.in_basis[leave_var] = -1
            self.in_basis[j] = leave
            self.basis[leave] = j
            piv = alpha[leave]
            row = self.Binv[leave, :].copy()
            w = alpha.copy()
            w[leave] -= 1.0
            self.Binv = dger(-1.0 / piv, w, row, a=self.Binv, overwrite_a=True)
            self.since_refactor += 1
            if self.since_refactor >= REFACTOR_EVERY:
                self.refactor()


def solve_lp(p: LPProblem, max_pivots: int = MAX_PIVOTS, rule: str = "hybrid") -> LPSolution:
    """Solve ``p``; status is one of optimal, infeasible, unbounded, iteration-limit.

    ``rule="bland"`` always enters the lowest-index improving column.
    ``rule="hybrid"`` prices by largest reduced cost and falls back to Bland's
    rule after ``DEGENERATE_STALL`` consecutive degenerate pivots, which keeps
    the anti-cycling guarantee (a cycle consists only of degenerate pivots).
    """
    if rule not in ("bland", "hybrid"):
        raise InvalidInputError(f"unknown pivot rule {rule!r}")
    std = _Standard(p)
    n = p.objective.shape[0]
    sx = _Simplex(std, max_pivots, rule)
    phase1 = np.zeros(std.N)
    phase1[std.art_start:] = 1.0
    status = sx.run(phase1)
    if status == "iteration-limit":
        return LPSolution(status, pivots=sx.pivots)
    sx.refactor()
    infeas = float(sx.x[std.art_start:].sum())
    if infeas > FEAS_TOL * max(1.0, np.abs(std.b).max(initial=0.0)):
        return LPSolution("infeasible", pivots=sx.pivots)
    # artificials are pinned at zero for phase 2
    std.u[std.art_start:] = 0.0
    sx.banned[std.art_start:] = True
    sx.x[std.art_start:] = np.where(sx.in_basis[std.art_start:] >= 0, sx.x[std.art_start:], 0.0)
    status = sx.run(std.c)
    if status != "optimal":
        return LPSolution(status, pivots=sx.pivots)
    sx.refactor()
    log.debug("simplex finished after %d pivots", sx.pivots)
    x = std.recover(sx.x, n)
    y = std.c[sx.basis] @ sx.Binv
    d = std.reduced_costs(std.c, y)
    nonbasic = (sx.in_basis < 0) & ~sx.banned
    wrong = np.where(sx.at_upper, d, -d)
    dual_viol = float(max(np.max(np.where(nonbasic, wrong, 0.0), initial=0.0),
                          np.max(np.abs(d[sx.basis]), initial=0.0)))
    return LPSolution("optimal", float(p.objective @ x), x, primal_violation(p, x), dual_viol,
                      sx.pivots, y * std.flip)


def primal_violation(p: LPProblem, x: np.ndarray) -> float:
    """Largest violation of any row or bound of ``p`` at ``x``."""
    ax = p.A @ x
    viol = 0.0
    for s, lhs, rhs in zip(p.senses, ax, p.rhs):
        if s == "<=":
            viol = max(viol, lhs - rhs)
        elif s == ">=":
            viol = max(viol, rhs - lhs)
        else:
            viol = max(viol, abs(lhs - rhs))
    viol = max(viol, float(np.max(p.lower - x, initial=0.0)), float(np.max(x - p.upper, initial=0.0)))
    return float(viol)
