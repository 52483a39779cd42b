"""Command-line front end.

Four subcommands:

    bound     value of one relaxation for a matrix read from a file
    compare   every applicable bound for one matrix, with ordering checks
    examples  recompute the bundled reference instance and check the values
    sweep-p   CSV of the lp bound curves over a grid of p values

Matrix files are plain text: lines starting with '#' are comments, the
first data line is the order n, then n rows of n whitespace-separated
reals.  The matrix is symmetrized as (Q + Q')/2 on load.

Exit codes: 0 success, 1 input error, 2 solver hit its iteration limit
(or a computed guarantee failed to hold numerically).
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from .conic import SolverSettings, SolverStatus
from .instances import EXAMPLE1_Q, REFERENCE_VALUES
from .linalg import lambda_max
from .oracle import (
    EXACT_DIM_CAP,
    qpl1_exact_small,
    qpl2l1_heuristic,
    qplp_lower_bound,
)
from .relax import Relaxation, eq_bound_certificate, lp_factor, solve_relaxation
from .rng import SplitMix64, random_symmetric


class CliError(Exception):
    """User-input problem; rendered as a message and exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


def _round10(value: float) -> float:
    """Round to 10 significant digits so text and JSON show identical values."""
    return float(f"{value:.10g}")


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def load_matrix(path: str) -> np.ndarray:
    """Parse a matrix file; see the module docstring for the format."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise CliError(f"matrix file: {exc}") from exc
    data = [ln.strip() for ln in lines]
    data = [ln for ln in data if ln and not ln.startswith("#")]
    if not data:
        raise CliError("matrix file: no data lines outside comments")
    try:
        n = int(data[0])
    except ValueError as exc:
        raise CliError(f"matrix file: first data line must be the order n, got {data[0]!r}") from exc
    if n < 1:
        raise CliError(f"matrix file: order must be positive, got {n}")
    if len(data) - 1 != n:
        raise CliError(f"matrix file: expected {n} matrix rows, found {len(data) - 1}")
    out = np.zeros((n, n))
    for i, line in enumerate(data[1:]):
        parts = line.split()
        if len(parts) != n:
            raise CliError(f"matrix file: row {i + 1} has {len(parts)} entries, expected {n}")
        try:
            out[i] = [float(tok) for tok in parts]
        except ValueError as exc:
            raise CliError(f"matrix file: row {i + 1}: {exc}") from exc
    if not np.all(np.isfinite(out)):
        raise CliError("matrix file: non-finite entry")
    return 0.5 * (out + out.T)


def _require_params(kind: Relaxation, k, p):
    if kind.needs_k and k is None:
        raise CliError(f"--k is required for relaxation {kind.value}")
    if not kind.needs_k and k is not None:
        raise CliError(f"--k is not accepted by relaxation {kind.value}")
    if kind.needs_p and p is None:
        raise CliError(f"--p is required for relaxation {kind.value}")
    if not kind.needs_p and p is not None:
        raise CliError(f"--p is not accepted by relaxation {kind.value}")


def _solve_entry(kind: Relaxation, q, k, p, settings):
    """Solve one relaxation and package the reportable numbers."""
    t0 = time.perf_counter()
    try:
        res = solve_relaxation(kind, q, k=k, p=p, settings=settings)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    seconds = time.perf_counter() - t0
    sol = res.solution
    entry = {
        "value": _round10(sol.objective),
        "status": sol.status.value,
        "iterations": sol.iterations,
        "residual_primal": _round10(sol.residual_primal),
        "residual_dual": _round10(sol.residual_dual),
        "residual_gap": _round10(sol.residual_gap),
        "seconds": _round10(seconds),
    }
    return res, entry


# ---------------------------------------------------------------- bound

def cmd_bound(args) -> int:
    q = load_matrix(args.matrix)
    kind = Relaxation(args.relaxation)
    _require_params(kind, args.k, args.p)
    settings = SolverSettings(tol=args.tol, max_iter=args.max_iter)
    res, entry = _solve_entry(kind, q, args.k, args.p, settings)
    payload = {
        "instance": args.matrix,
        "n": int(q.shape[0]),
        "relaxation": kind.value,
        "k": args.k,
        "p": args.p,
        **entry,
    }
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        for key, value in payload.items():
            if value is not None:
                print(f"{key:16s} {_fmt(value)}")
    return 0 if res.solution.status is SolverStatus.OPTIMAL else 2


# ---------------------------------------------------------------- compare

def _check(name, kind, lhs, rhs, margin, informational=False):
    satisfied = lhs <= rhs + margin if kind == "<=" else lhs >= rhs - margin
    return {
        "check": name,
        "satisfied": bool(satisfied),
        "lhs": lhs,
        "rhs": rhs,
        "margin": _round10(margin),
        "informational": bool(informational),
    }


def build_report(q, instance, k, p, settings, seed=0, restarts=20) -> dict:
    """Compute every applicable bound for one matrix and cross-check orderings.

    All ordering flags are recomputed from the rounded, reported values.
    """
    n = int(q.shape[0])
    lam = _round10(lambda_max(q))
    bounds: dict[str, dict] = {}
    lower: dict[str, dict] = {}
    results = {}

    def run(name, kind, kk=None, pp=None):
        res, entry = _solve_entry(kind, q, kk, pp, settings)
        bounds[name] = entry
        results[name] = res
        return res

    run("dnn_l1", Relaxation.DNN_L1)
    run("dnn_l1_new", Relaxation.DNN_L1_NEW)

    if n <= EXACT_DIM_CAP:
        t0 = time.perf_counter()
        orc = qpl1_exact_small(q)
        lower["l1_exact"] = {
            "value": _round10(orc.value),
            "maximizer": [_round10(v) for v in orc.maximizer],
            "method": orc.method,
            "seconds": _round10(time.perf_counter() - t0),
        }

    certificate = None
    if k is not None:
        run("sdp_x", Relaxation.SDP_X, kk=k)
        run("dnn_l2l1", Relaxation.DNN_L2L1, kk=k)
        run("dnn_l2l1_new_le", Relaxation.DNN_L2L1_NEW_LE, kk=k)
        run("dnn_l2l1_new_eq", Relaxation.DNN_L2L1_NEW_EQ, kk=k)
        t0 = time.perf_counter()
        try:
            heur = qpl2l1_heuristic(q, k, restarts=restarts, seed=seed)
        except ValueError as exc:
            raise CliError(str(exc)) from exc
        lower["l2l1_heuristic"] = {
            "value": _round10(heur.value),
            "maximizer": [_round10(v) for v in heur.maximizer],
            "method": heur.method,
            "seconds": _round10(time.perf_counter() - t0),
        }
        cert = eq_bound_certificate(q, k, bounds["dnn_l2l1"]["value"])
        certificate = {
            "certified": cert.certified,
            "reason": cert.reason,
            "lambda_max": _round10(cert.lambda_max),
            "eigvec_l1": None if cert.eigvec_l1 is None else _round10(cert.eigvec_l1),
        }

    if p is not None:
        res_lp = run("dnn_lp", Relaxation.DNN_LP, pp=p)
        bounds["b1"] = {
            "value": _round10(lp_factor(n, p) * bounds["dnn_l1"]["value"]),
            "status": "derived",
        }
        bounds["b2"] = {"value": _round10(max(lam, 0.0)), "status": "closed_form"}
        t0 = time.perf_counter()
        orc = qplp_lower_bound(q, p, res_lp.matrix)
        lower["lp_rounding"] = {
            "value": _round10(orc.value),
            "maximizer": [_round10(v) for v in orc.maximizer],
            "method": orc.method,
            "seconds": _round10(time.perf_counter() - t0),
        }

    def margin(lhs, rhs):
        return max(1e-5, 2.0 * settings.tol * (1.0 + abs(lhs) + abs(rhs)))

    val = lambda name: bounds[name]["value"]
    checks = []

    def add(name, kind, lhs, rhs, informational=False):
        checks.append(_check(name, kind, lhs, rhs, margin(lhs, rhs), informational))

    add("dnn_l1 >= dnn_l1_new", ">=", val("dnn_l1"), val("dnn_l1_new"))
    add("dnn_l1_new >= 0", ">=", val("dnn_l1_new"), 0.0)
    if "l1_exact" in lower:
        add("dnn_l1_new >= l1_exact", ">=", val("dnn_l1_new"), lower["l1_exact"]["value"])
    if k is not None:
        add("sdp_x >= dnn_l2l1", ">=", val("sdp_x"), val("dnn_l2l1"))
        add("dnn_l2l1 <= lambda_max", "<=", val("dnn_l2l1"), lam)
        add("dnn_l2l1_new_le <= lambda_max", "<=", val("dnn_l2l1_new_le"), lam)
        heur_val = lower["l2l1_heuristic"]["value"]
        add("l2l1_heuristic <= sdp_x", "<=", heur_val, val("sdp_x"))
        add("l2l1_heuristic <= dnn_l2l1", "<=", heur_val, val("dnn_l2l1"))
        add("l2l1_heuristic <= lambda_max", "<=", heur_val, lam)
        # No proof exists either way; recorded per instance, never asserted.
        add("dnn_l2l1 >= dnn_l2l1_new_le (observed)", ">=",
            val("dnn_l2l1"), val("dnn_l2l1_new_le"), informational=True)
    if p is not None:
        add("lp_rounding <= dnn_lp", "<=", lower["lp_rounding"]["value"], val("dnn_lp"))
        add("dnn_lp <= b1", "<=", val("dnn_lp"), val("b1"))
        add("dnn_lp <= b2", "<=", val("dnn_lp"), val("b2"))

    return {
        "instance": instance,
        "n": n,
        "k": k,
        "p": p,
        "solver_tol": settings.tol,
        "lambda_max": lam,
        "bounds": bounds,
        "lower_bounds": lower,
        "orderings": checks,
        "certificate": certificate,
    }


def _print_report_text(report: dict) -> None:
    head = f"instance {report['instance']}  (n={report['n']}"
    if report["k"] is not None:
        head += f", k={_fmt(report['k'])}"
    if report["p"] is not None:
        head += f", p={_fmt(report['p'])}"
    print(head + ")")
    print(f"lambda_max {_fmt(report['lambda_max'])}")
    print("\nbounds")
    for name, entry in report["bounds"].items():
        line = f"  {name:18s} {_fmt(entry['value']):>16s}  {entry.get('status', ''):10s}"
        if "iterations" in entry:
            line += f" {entry['iterations']:7d} it  {entry['seconds']:.3f}s"
        print(line)
    if report["lower_bounds"]:
        print("\nlower bounds")
        for name, entry in report["lower_bounds"].items():
            print(f"  {name:18s} {_fmt(entry['value']):>16s}  {entry['method']}")
    print("\norderings")
    for chk in report["orderings"]:
        mark = "obs " if chk["informational"] else ("ok  " if chk["satisfied"] else "FAIL")
        print(f"  [{mark}] {chk['check']:38s} ({_fmt(chk['lhs'])} vs {_fmt(chk['rhs'])})")
    cert = report["certificate"]
    if cert is not None:
        verdict = "certified upper bound" if cert["certified"] else "NOT certified"
        print(f"\ndnn_l2l1_new_eq: {verdict} — {cert['reason']}")


def _print_report_csv(report: dict) -> None:
    print("metric,value")
    print(f"lambda_max,{_fmt(report['lambda_max'])}")
    for name, entry in report["bounds"].items():
        print(f"{name},{_fmt(entry['value'])}")
    for name, entry in report["lower_bounds"].items():
        print(f"{name},{_fmt(entry['value'])}")
    for chk in report["orderings"]:
        print(f"ordering:{chk['check'].replace(',', ';')},{int(chk['satisfied'])}")


def cmd_compare(args) -> int:
    q = load_matrix(args.matrix)
    try:
        report = build_report(
            q,
            instance=args.matrix,
            k=args.k,
            p=args.p,
            settings=SolverSettings(tol=args.tol, max_iter=args.max_iter),
            seed=args.seed,
            restarts=args.restarts,
        )
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    if args.format == "json":
        print(json.dumps(report, indent=2))
    elif args.format == "csv":
        _print_report_csv(report)
    else:
        _print_report_text(report)
    hit_limit = any(
        entry.get("status") == SolverStatus.ITER_LIMIT.value
        for entry in report["bounds"].values()
    )
    return 2 if hit_limit else 0


# ---------------------------------------------------------------- examples

def cmd_examples(args) -> int:
    settings = SolverSettings(tol=args.solver_tol)
    q = EXAMPLE1_Q
    jobs = [
        ("dnn_l1", Relaxation.DNN_L1, None),
        ("dnn_l1_new", Relaxation.DNN_L1_NEW, None),
        ("sdp_x_k3", Relaxation.SDP_X, 3.0),
        ("dnn_l2l1_k3", Relaxation.DNN_L2L1, 3.0),
        ("dnn_l2l1_new_le_k3", Relaxation.DNN_L2L1_NEW_LE, 3.0),
        ("dnn_l2l1_new_eq_k5", Relaxation.DNN_L2L1_NEW_EQ, 5.0),
    ]
    all_pass = True
    computed = {}
    print(f"{'name':22s} {'computed':>14s} {'reference':>12s} {'tol':>8s}  result")
    for name, kind, k in jobs:
        reference, row_tol = REFERENCE_VALUES[name]
        if args.tol is not None:
            row_tol = args.tol
        res, entry = _solve_entry(kind, q, k, None, settings)
        computed[name] = entry["value"]
        ok = (
            res.solution.status is SolverStatus.OPTIMAL
            and abs(entry["value"] - reference) <= row_tol
        )
        note = "pass" if ok else "FAIL"
        if res.solution.status is not SolverStatus.OPTIMAL:
            note += (
                f" ({entry['status']}, residuals {entry['residual_primal']:.1e}/"
                f"{entry['residual_dual']:.1e}/{entry['residual_gap']:.1e})"
            )
        all_pass &= ok
        print(f"{name:22s} {entry['value']:14.6f} {reference:12.4f} {row_tol:8.0e}  {note}")

    reference, row_tol = REFERENCE_VALUES["lambda_max"]
    if args.tol is not None:
        row_tol = args.tol
    lam = _round10(lambda_max(q))
    ok = abs(lam - reference) <= row_tol
    all_pass &= ok
    print(f"{'lambda_max':22s} {lam:14.6f} {reference:12.4f} {row_tol:8.0e}  "
          f"{'pass' if ok else 'FAIL'}")

    # The tightened equality form must land strictly below lambda_max here.
    gap = lam - computed["dnn_l2l1_new_eq_k5"]
    ok = gap > 0.02
    all_pass &= ok
    print(f"{'strict gap (eq < lam)':22s} {gap:14.6f} {'> 0.02':>12s} {'':8s}  "
          f"{'pass' if ok else 'FAIL'}")
    return 0 if all_pass else 2


# ---------------------------------------------------------------- sweep-p

def _parse_grid(spec: str) -> list[float]:
    parts = spec.split(":")
    if len(parts) != 3:
        raise CliError(f"--grid must be START:STEP:END, got {spec!r}")
    try:
        start, step, end = (float(tok) for tok in parts)
    except ValueError as exc:
        raise CliError(f"--grid must be numeric START:STEP:END: {exc}") from exc
    if step <= 0.0 or end < start:
        raise CliError(f"--grid needs a positive step and START <= END, got {spec!r}")
    count = int(np.floor((end - start) / step + 1e-9)) + 1
    values = [start + i * step for i in range(count)]
    if values[0] <= 1.0 or values[-1] >= 2.0:
        raise CliError(f"--grid must lie strictly inside (1, 2), got {spec!r}")
    return values


def cmd_sweep_p(args) -> int:
    if not (1 <= args.n <= 20):
        raise CliError(f"--n must be in [1, 20], got {args.n}")
    grid = _parse_grid(args.grid)
    settings = SolverSettings(tol=args.tol)
    rng = SplitMix64(args.seed)
    q = random_symmetric(rng, args.n, 0.0, 1.0)

    res_l1, _ = _solve_entry(Relaxation.DNN_L1, q, None, None, settings)
    b2 = max(lambda_max(q), 0.0)
    lines = ["p,lower,dnn_lp,b1,b2"]
    for p in grid:
        res_lp, entry = _solve_entry(Relaxation.DNN_LP, q, None, p, settings)
        lower = qplp_lower_bound(q, p, res_lp.matrix).value
        b1 = lp_factor(args.n, p) * res_l1.solution.objective
        slack = max(1e-5, 2.0 * settings.tol * (1.0 + abs(entry["value"]) + abs(b1) + abs(b2)))
        if not (lower - slack <= entry["value"] <= min(b1, b2) + slack):
            print(
                f"error: bound sandwich violated at p={p:.6g}: "
                f"lower={lower:.10g} dnn_lp={entry['value']:.10g} "
                f"b1={b1:.10g} b2={b2:.10g}",
                file=sys.stderr,
            )
            return 2
        lines.append(f"{p:.12g},{lower:.12g},{entry['value']:.12g},{b1:.12g},{b2:.12g}")
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {len(grid)} rows to {args.out}")
    return 0


# ---------------------------------------------------------------- wiring

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="qpbounds", description=__doc__,
                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bound", help="value of one relaxation for a matrix file")
    b.add_argument("--matrix", required=True, help="path of the matrix file")
    b.add_argument("--relaxation", required=True, choices=[r.value for r in Relaxation])
    b.add_argument("--k", type=float, help="l1 budget, needed for the sphere forms")
    b.add_argument("--p", type=float, help="lp exponent in (1, 2), needed for dnn-lp")
    b.add_argument("--tol", type=float, default=1e-7, help="solver tolerance")
    b.add_argument("--max-iter", type=int, default=200_000, help="solver iteration cap")
    b.add_argument("--format", choices=("text", "json"), default="text")
    b.set_defaults(func=cmd_bound)

    c = sub.add_parser("compare", help="all applicable bounds plus ordering checks")
    c.add_argument("--matrix", required=True)
    c.add_argument("--k", type=float)
    c.add_argument("--p", type=float)
    c.add_argument("--tol", type=float, default=1e-7, help="solver tolerance")
    c.add_argument("--max-iter", type=int, default=200_000, help="solver iteration cap")
    c.add_argument("--seed", type=int, default=0, help="seed for the heuristic lower bound")
    c.add_argument("--restarts", type=int, default=20, help="heuristic restarts")
    c.add_argument("--format", choices=("text", "json", "csv"), default="text")
    c.set_defaults(func=cmd_compare)

    e = sub.add_parser("examples", help="recompute the bundled reference instance")
    e.add_argument("--tol", type=float, default=None,
                   help="absolute tolerance for every row (default: per-row reference tolerance)")
    e.add_argument("--solver-tol", type=float, default=1e-7, help="solver tolerance")
    e.set_defaults(func=cmd_examples)

    s = sub.add_parser("sweep-p", help="CSV of bound curves over a p grid")
    s.add_argument("--n", type=int, required=True, help="instance size (at most 20)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--grid", required=True, help="p grid as START:STEP:END inside (1, 2)")
    s.add_argument("--out", required=True, help="output CSV path")
    s.add_argument("--tol", type=float, default=1e-7, help="solver tolerance")
    s.set_defaults(func=cmd_sweep_p)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
