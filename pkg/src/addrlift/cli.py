"""Command-line front end: generate, analyze, simulate, lift checks and the sweep table."""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import approxlp, boolfn, liftlab, poly, qsim
from .constructions import BlockLayout, make_hadd, composed_F, partial_F
from .errors import InvalidInputError, InvariantViolation, ResourceLimitError

log = logging.getLogger("addrlift")

EXIT_OK, EXIT_INVALID, EXIT_GUARD, EXIT_INVARIANT = 0, 2, 3, 4
SWEEP_HEADER = ["l", "k", "n_bits", "promise_count", "sim_total_queries", "min_succ_promise",
                "min_succ_nonpromise", "adeg_F", "log2_specnorm_F", "proof_floor", "cs_upper_bound"]
DEFAULT_GRID = ((2, 2), (2, 4), (4, 2))
PROMISE_TOL = 1e-10


def _fmt(v) -> str:
    if v is None:
        return "NA"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "%.10g" % v


def _dump(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def layout_path(function_path: str | Path) -> Path:
    p = Path(function_path)
    return p.with_name(p.stem + ".layout.json")


def _read_function(path: str):
    try:
        return boolfn.loads(Path(path).read_text())
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from exc


def _read_layout(path: str) -> BlockLayout:
    try:
        return BlockLayout.from_json(Path(path).read_text())
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from exc


def _params_of(layout: BlockLayout) -> tuple[int, int]:
    if layout.m != layout.k:
        raise InvalidInputError("layout is not that of a HADD composition (m != k)")
    return layout.m, 2 * layout.blocks


# --- gen --------------------------------------------------------------------

def cmd_gen(l: int, k: int, out: str | None) -> tuple[str, str]:
    F, layout = composed_F(l, k)
    ftext = boolfn.dumps(F)
    ltext = _dump(layout.to_json())
    if out:
        Path(out).write_text(ftext)
        layout_path(out).write_text(ltext)
    return ftext, ltext


# --- analyze ----------------------------------------------------------------

def cmd_analyze(path: str, eps: float, tol: float, guard_n: int, backend: str) -> dict:
    f = _read_function(path)
    doc = {"n": f.n, "kind": "total" if isinstance(f, boolfn.TruthTable) else "partial",
           "promise_count": int(f.promise_count)}
    if isinstance(f, boolfn.TruthTable):
        spec = boolfn.spectrum(f)
        doc["spectral_norm"] = boolfn.spectral_norm(spec)
        doc["min_entropy"] = boolfn.min_entropy(spec)
        doc["influence"] = boolfn.influence(spec)
    deg = approxlp.approx_degree(f, eps, backend=backend, guard_n=guard_n)
    approxlp.check_witness(deg, f, tol)
    norm = approxlp.approx_spectral_norm(f, eps, backend=backend, guard_n=guard_n)
    approxlp.check_witness(norm, f, tol)
    doc["approx_degree"] = deg.to_json()
    doc["approx_spectral_norm"] = norm.to_json()
    return doc


# --- simulate ---------------------------------------------------------------

@dataclass
class SimSummary:
    inputs: int
    min_succ_promise: float
    min_succ_nonpromise: float | None
    max_total_queries: int
    query_budget: int

    def to_json(self) -> dict:
        return dict(self.__dict__)


def simulate_all(l: int, k: int, guard_n: int) -> SimSummary:
    F, layout = composed_F(l, k)
    if F.n > guard_n:
        raise ResourceLimitError(f"exhaustive simulation over 2^{F.n} inputs exceeds guard n <= {guard_n}")
    promise = partial_F(l, k)[0].promise
    succ_p, succ_n, queries = 1.0, None, 0
    for xi in range(1 << F.n):
        r = qsim.algorithm_F(boolfn.point(xi, F.n), l, k, layout)
        if r.true_value != F.values[xi]:
            raise InvariantViolation(f"simulated truth value disagrees with F at input {xi}")
        queries = max(queries, r.queries["total"])
        if promise[xi]:
            succ_p = min(succ_p, r.success_prob)
        else:
            succ_n = r.success_prob if succ_n is None else min(succ_n, r.success_prob)
    return SimSummary(1 << F.n, succ_p, succ_n, queries, qsim.query_budget(l, k))


def _parse_input(text: str, n: int) -> tuple[int, ...]:
    if len(text) != n or set(text) - set("+-"):
        raise InvalidInputError(f"--input must be a string of {n} characters over '+-'")
    return tuple(1 if c == "+" else -1 for c in text)


def cmd_simulate(path: str, layout_file: str | None, single: str | None, guard_n: int) -> dict:
    f = _read_function(path)
    layout = _read_layout(layout_file or str(layout_path(path)))
    l, k = _params_of(layout)
    F, expected = composed_F(l, k)
    if layout != expected or f.n != F.n or not np.array_equal(f.values, F.values):
        raise InvalidInputError("function file is not the composed function for its layout")
    if single is not None:
        return qsim.algorithm_F(_parse_input(single, f.n), l, k, layout).to_json()
    return simulate_all(l, k, guard_n).to_json()


# --- liftcheck / pipeline ---------------------------------------------------

def cmd_liftcheck(l: int, k: int, eps: float, eps_degree: float, guard_n: int, backend: str) -> dict:
    rep = liftlab.lift_bound_check(l, k, eps=eps, eps_degree=eps_degree, backend=backend,
                                    guard_n=guard_n)
    if not rep.holds:
        raise InvariantViolation(f"log2 norm {rep.lp_log2_norm:g} below floor {rep.proof_floor:g}")
    return rep.to_json()


def cmd_pipeline(poly_path: str, l: int, k: int, eps_in: float, eps_degree: float) -> dict:
    try:
        P = poly.from_json(Path(poly_path).read_text())
    except OSError as exc:
        raise InvalidInputError(f"cannot read {poly_path}: {exc}") from exc
    outer = boolfn.parity(k // 2)
    _, layout = partial_F(l, k)
    D = int(approxlp.approx_degree(outer, eps_degree).value)
    res = liftlab.degree_reduction_pipeline(P, make_hadd(l), layout, outer, D, eps_in)
    return {"D": D, **res.to_json(), "polynomial": poly.to_json(res.polynomial)}


# --- sweep ------------------------------------------------------------------

def sweep_row(l: int, k: int, eps: float, eps_degree: float, guard_n: int, backend: str) -> dict:
    F, _ = composed_F(l, k)
    row = {"l": l, "k": k, "n_bits": F.n, "promise_count": int(partial_F(l, k)[0].promise_count)}
    row.update({h: None for h in SWEEP_HEADER[4:]})
    try:
        sim = simulate_all(l, k, guard_n)
        row.update(sim_total_queries=sim.max_total_queries, min_succ_promise=sim.min_succ_promise,
                   min_succ_nonpromise=sim.min_succ_nonpromise)
    except ResourceLimitError as exc:
        log.warning("sweep (%d,%d): simulation skipped: %s", l, k, exc)
    try:
        adeg = int(approxlp.approx_degree(F, eps, guard_n=guard_n, backend=backend).value)
        norm = approxlp.approx_spectral_norm(F, eps, guard_n=guard_n, backend=backend).value
        row.update(adeg_F=adeg, log2_specnorm_F=math.log2(norm),
                   cs_upper_bound=math.log2(4 / 3) + adeg / 2 * math.log2(F.n + 1))
        lift = liftlab.lift_bound_check(l, k, eps=eps, eps_degree=eps_degree, backend=backend,
                                         guard_n=guard_n)
        row["proof_floor"] = lift.proof_floor
    except ResourceLimitError as exc:
        log.warning("sweep (%d,%d): LP columns skipped: %s", l, k, exc)
    check_row(row)
    return row


def check_row(row: dict) -> None:
    if row["min_succ_promise"] is not None and abs(row["min_succ_promise"] - 1) > PROMISE_TOL:
        raise InvariantViolation(f"row {row['l']},{row['k']}: promise success below 1")
    if row["min_succ_nonpromise"] is not None and row["min_succ_nonpromise"] < 2 / 3:
        raise InvariantViolation(f"row {row['l']},{row['k']}: non-promise success below 2/3")
    chain = [row["proof_floor"], row["log2_specnorm_F"], row["cs_upper_bound"]]
    if None not in chain and not chain[0] <= chain[1] <= chain[2] + approxlp.TOL.objective:
        raise InvariantViolation(f"row {row['l']},{row['k']}: floor <= log2 norm <= bound fails")


def cmd_sweep(grid, eps: float, eps_degree: float, guard_n: int, backend: str) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for l, k in grid:
        row = sweep_row(l, k, eps, eps_degree, guard_n, backend)
        w.writerow([_fmt(row[h]) for h in SWEEP_HEADER])
    return buf.getvalue()


def _grid_cell(text: str) -> tuple[int, int]:
    try:
        l, k = (int(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"grid cell must look like L,K: {text!r}") from exc
    return l, k


# --- entry point ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--eps", type=float, default=1 / 3, help="approximation error (default 1/3)")
    common.add_argument("--eps-degree", type=float, default=0.99,
                        help="error for the degree D in the lift check (default 0.99)")
    common.add_argument("--tol", type=float, default=approxlp.TOL.witness, help="witness tolerance")
    common.add_argument("--guard-n", type=int, default=approxlp.LP_GUARD_N,
                        help="largest n for LPs and exhaustive simulation (default 14)")
    common.add_argument("--backend", choices=["auto", "simplex", "ipm"], default="auto")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="addrlift", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)
    g = sub.add_parser("gen", parents=[common], help="write the composed function and its layout")
    g.add_argument("l", type=int)
    g.add_argument("k", type=int)
    a = sub.add_parser("analyze", parents=[common], help="Fourier statistics and LP quantities")
    a.add_argument("file")
    s = sub.add_parser("simulate", parents=[common], help="run the query algorithm exactly")
    s.add_argument("file")
    s.add_argument("--layout", help="layout sidecar (default: <file stem>.layout.json)")
    s.add_argument("--input", help="single input as a string over '+-'")
    c = sub.add_parser("liftcheck", parents=[common], help="LP norm against the lift floor")
    c.add_argument("l", type=int)
    c.add_argument("k", type=int)
    p = sub.add_parser("pipeline", parents=[common], help="degree reduction of a given polynomial")
    p.add_argument("polynomial")
    p.add_argument("l", type=int)
    p.add_argument("k", type=int)
    w = sub.add_parser("sweep", parents=[common], help="CSV table over a parameter grid")
    w.add_argument("--grid", nargs="+", type=_grid_cell, default=list(DEFAULT_GRID),
                   metavar="L,K")
    return ap


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        if args.cmd == "gen":
            ftext, ltext = cmd_gen(args.l, args.k, args.out)
            if not args.out:
                sys.stdout.write(_dump({"function": json.loads(ftext), "layout": json.loads(ltext)}))
        elif args.cmd == "analyze":
            _emit(_dump(cmd_analyze(args.file, args.eps, args.tol, args.guard_n, args.backend)), args.out)
        elif args.cmd == "simulate":
            _emit(_dump(cmd_simulate(args.file, args.layout, args.input, args.guard_n)), args.out)
        elif args.cmd == "liftcheck":
            _emit(_dump(cmd_liftcheck(args.l, args.k, args.eps, args.eps_degree, args.guard_n,
                                      args.backend)), args.out)
        elif args.cmd == "pipeline":
            _emit(_dump(cmd_pipeline(args.polynomial, args.l, args.k, args.eps, args.eps_degree)),
                  args.out)
        elif args.cmd == "sweep":
            _emit(cmd_sweep(args.grid, args.eps, args.eps_degree, args.guard_n, args.backend), args.out)
    except InvalidInputError as exc:
        log.error("invalid input: %s", exc)
        return EXIT_INVALID
    except ResourceLimitError as exc:
        log.error("resource guard: %s", exc)
        return EXIT_GUARD
    except InvariantViolation as exc:
        log.error("invariant violated: %s", exc)
        return EXIT_INVARIANT
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
