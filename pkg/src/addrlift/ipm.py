"""Dense primal-dual interior point method (Mehrotra predictor-corrector).

Used for LPs too large for the tableau-free simplex to finish in reasonable
time (the 12-bit spectral-norm LPs). Works on the same standard form as the
simplex: min c.x, A x = b, 0 <= x <= u, with unit columns folded into the
diagonal of the normal matrix.
"""
from __future__ import annotations

import logging

import numpy as np
import scipy.linalg as sla

from .simplex import LPProblem, LPSolution, _Standard, primal_violation

log = logging.getLogger(__name__)

MAX_ITER = 200
STEP = 0.995
GAP_TOL = 1e-10
RES_TOL = 1e-9


def _normal_matrix(std: _Standard, theta: np.ndarray) -> np.ndarray:
    ns = std.n_struct
    scaled = std.As * np.sqrt(theta[:ns])
    M = sla.blas.dsyrk(1.0, scaled, lower=True)
    diag = np.zeros(std.m)
    np.add.at(diag, std.unit_rows, theta[ns:])
    M[np.diag_indices_from(M)] += diag
    return M


def _max_step(v: np.ndarray, dv: np.ndarray) -> float:
    neg = dv < 0
    if not neg.any():
        return 1.0
    return float(min(1.0, np.min(-v[neg] / dv[neg])))


def solve_lp_ipm(p: LPProblem, max_iter: int = MAX_ITER) -> LPSolution:
    std = _Standard(p)
    # artificial columns are not needed: drop them
    keep = std.art_start
    std.unit_rows = std.unit_rows[: keep - std.n_struct]
    std.unit_signs = std.unit_signs[: keep - std.n_struct]
    std.N = N = keep
    c, u, b = std.c[:keep], std.u[:keep], std.b
    bounded = np.isfinite(u)
    ub = np.where(bounded, u, 0.0)

    x = np.where(bounded, ub / 2, 1.0)
    w = np.where(bounded, ub - x, 0.0)
    z = np.ones(N)
    s = np.where(bounded, 1.0, 0.0)
    y = np.zeros(std.m)
    nb = int(bounded.sum())
    scale_b = 1.0 + np.abs(b).max(initial=0.0)
    scale_c = 1.0 + np.abs(c).max(initial=0.0)

    def at(v):
        return np.r_[v @ std.As, std.unit_signs * v[std.unit_rows]]

    for it in range(1, max_iter + 1):
        rb = b - std.times(x)
        ru = np.where(bounded, ub - x - w, 0.0)
        rc = c - at(y) - z + s
        mu = (x @ z + w @ s) / (N + nb)
        pobj = c @ x
        dobj = b @ y - ub @ s
        gap = abs(pobj - dobj) / (1.0 + abs(pobj))
        pres = max(np.abs(rb).max(initial=0.0), np.abs(ru).max(initial=0.0)) / scale_b
        dres = np.abs(rc).max(initial=0.0) / scale_c
        log.debug("ipm %3d  pobj %.12g  dobj %.12g  pres %.1e  dres %.1e  mu %.1e",
                  it, pobj, dobj, pres, dres, mu)
        if gap < GAP_TOL and pres < RES_TOL and dres < RES_TOL:
            break
        if not np.all(np.isfinite([pobj, dobj, mu])):
            return LPSolution("iteration-limit", pivots=it)

        inv_w = np.where(bounded, 1.0 / np.where(bounded, w, 1.0), 0.0)
        theta = 1.0 / (z / x + s * inv_w)
        M = _normal_matrix(std, theta)
        M[np.diag_indices_from(M)] += 1e-14 * (1.0 + np.abs(np.diag(M)).max())
        factor = sla.cho_factor(M, lower=True, check_finite=False)

        def direction(rxz, rws):
            rhat = rc - rxz / x + (rws - s * ru) * inv_w
            dy = sla.cho_solve(factor, rb + std.times(theta * rhat),
                               check_finite=False)
            dx = theta * (at(dy) - rhat)
            dz = (rxz - z * dx) / x
            dw = np.where(bounded, ru - dx, 0.0)
            ds = np.where(bounded, (rws - s * dw) * inv_w, 0.0)
            return dx, dy, dz, dw, ds

        # predictor
        dx, dy, dz, dw, ds = direction(-x * z, -w * s)
        ap = min(_max_step(x, dx), _max_step(w[bounded], dw[bounded]))
        ad = min(_max_step(z, dz), _max_step(s[bounded], ds[bounded]))
        mu_aff = ((x + ap * dx) @ (z + ad * dz) + (w + ap * dw) @ (s + ad * ds)) / (N + nb)
        sigma = (mu_aff / mu) ** 3
        # corrector
        dx, dy, dz, dw, ds = direction(sigma * mu - x * z - dx * dz, sigma * mu - w * s - dw * ds)
        ap = STEP * min(_max_step(x, dx), _max_step(w[bounded], dw[bounded]))
        ad = STEP * min(_max_step(z, dz), _max_step(s[bounded], ds[bounded]))
        x += ap * dx
        w += ap * dw
        y += ad * dy
        z += ad * dz
        s += ad * ds
    else:
        return LPSolution("iteration-limit", pivots=max_iter)

    xo = std.recover(x, p.objective.shape[0])
    dual_viol = float(max(np.abs(rc).max(initial=0.0), 0.0))
    return LPSolution("optimal", float(p.objective @ xo), xo, primal_violation(p, xo), dual_viol,
                      it, y * std.flip)
