"""Command-line front end: ``circumfeas run | sweep | plot``."""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import sys
from pathlib import Path

import numpy as np

from .crm import RUNNERS, IterationTrace, Termination
from .errors import CircumfeasError, DimensionMismatch, OperatorUndefined
from .geometry import Tolerance
from .scenarios import GENERATORS, Scenario, load_scenario
from .sets import ConeV
from .sphere import in_zone, run_srm
from .svg import render_plane, render_sphere_orthographic

TRACE_FORMAT = "# circumfeas-trace v1"
METHODS = (*RUNNERS, "srm")
CLAIMS = {
    "random_cone_pair_r2": "planar cones: feasible in at most three steps",
    "random_polyhedra_r2": "planar polyhedra: feasible within max_iters",
}


class ExpectationError(Exception):
    pass


def _runner(method: str, scn: Scenario):
    if method == "srm":
        if scn.dim != 3:
            raise DimensionMismatch(f"srm needs cones in R^3, scenario {scn.name!r} is in R^{scn.dim}")
        if not (isinstance(scn.set_a, ConeV) and isinstance(scn.set_b, ConeV)):
            raise TypeError("srm needs two V-represented cones")
        return run_srm
    return RUNNERS[method]


def _with_overrides(scn: Scenario, args) -> Scenario:
    tol = scn.tol
    if args.eps_feas is not None or args.eps_degen is not None:
        tol = Tolerance(args.eps_feas if args.eps_feas is not None else tol.eps_feas,
                        args.eps_degen if args.eps_degen is not None else tol.eps_degen)
    max_iters = args.max_iters if args.max_iters is not None else scn.max_iters
    return dataclasses.replace(scn, tol=tol, max_iters=max_iters)


def verdict(scn: Scenario, trace: IterationTrace) -> str | None:
    """None when the run meets the scenario's expectation, else the reason."""
    ok = trace.terminated is Termination.FEASIBLE
    exp = scn.expected
    if exp is None:
        return None if ok else f"no expectation given and the run ended with {trace.terminated.value}"
    if exp.finite and not ok:
        return f"expected feasibility, run ended with {trace.terminated.value}"
    if not exp.finite and ok:
        return f"expected no finite termination, but feasible after {trace.iterations_used} steps"
    if exp.max_steps is not None and trace.iterations_used > exp.max_steps:
        return f"needed {trace.iterations_used} steps, expected at most {exp.max_steps}"
    return None


def trace_csv(trace: IterationTrace, dim: int) -> str:
    buf = io.StringIO()
    buf.write(TRACE_FORMAT + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["iter", *(f"x{i + 1}" for i in range(dim)), "dist_A", "dist_B", "cardinality_case"])
    for k, (p, da, db, case) in enumerate(trace.rows()):
        w.writerow([k, *(repr(float(v)) for v in p), repr(float(da)), repr(float(db)),
                    "" if case is None else case.value])
    return buf.getvalue()


def _zone_flag(scn: Scenario, x0: np.ndarray):
    if scn.dim == 3 and isinstance(scn.set_a, ConeV) and isinstance(scn.set_b, ConeV):
        try:
            return in_zone(scn.set_a, scn.set_b, x0, scn.tol)
        except CircumfeasError:
            return None
    return None


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _error(exc: BaseException) -> int:
    record = {"error": type(exc).__name__, "message": str(exc)}
    sys.stderr.write(json.dumps(record, sort_keys=True) + "\n")
    return 2


def cmd_run(args) -> int:
    try:
        scn = _with_overrides(load_scenario(args.scenario), args)
        run = _runner(args.method, scn)
        if not 0 <= args.start < len(scn.initial_points):
            raise IndexError(f"start index {args.start} out of range")
        x0 = scn.initial_points[args.start]
        trace = run(scn.set_a, scn.set_b, x0, scn.tol, scn.max_iters)
        reason = verdict(scn, trace)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "trace.csv").write_text(trace_csv(trace, scn.dim))
        (out / "trace.json").write_text(_dump({
            "format": TRACE_FORMAT[2:], "scenario": scn.to_dict(), "method": args.method,
            "start": args.start, "trace": trace.to_dict()}))
        summary = {
            "scenario": scn.name, "method": args.method, "start": args.start,
            "terminated": trace.terminated.value, "iterations_used": trace.iterations_used,
            "final_point": trace.final_point.tolist(), "final_dist_a": trace.final_dist_a,
            "final_dist_b": trace.final_dist_b, "in_zone": _zone_flag(scn, x0),
            "expectation_met": reason is None, "violation": reason,
        }
        (out / "summary.json").write_text(_dump(summary))
    except (CircumfeasError, KeyError, IndexError, TypeError, ValueError, OSError) as exc:
        return _error(exc)
    print(f"{scn.name} [{args.method}]: {trace.terminated.value} after {trace.iterations_used} steps")
    if reason is not None:
        print(f"expectation violated: {reason}")
        return 1
    return 0


def cmd_sweep(args) -> int:
    if args.count < 0:
        return _error(ValueError("count must be nonnegative"))
    gen = GENERATORS[args.generator]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows, worst, failures = [], 0, 0
    for seed in range(args.seed, args.seed + args.count):
        try:
            scn = _with_overrides(gen(seed), args)
            run = _runner(args.method, scn)
        except (CircumfeasError, TypeError, ValueError) as exc:
            return _error(exc)
        for i, x0 in enumerate(scn.initial_points):
            try:
                trace = run(scn.set_a, scn.set_b, x0, scn.tol, scn.max_iters)
                term, used = trace.terminated.value, trace.iterations_used
                bad = verdict(scn, trace) is not None
            except OperatorUndefined as exc:
                term = Termination.OPERATOR_UNDEFINED.value
                used = exc.trace.iterations_used if exc.trace is not None else 0
                bad = True
            worst = max(worst, used)
            failures += bad
            rows.append([seed, i, used, term, worst])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["seed", "start", "iterations_used", "terminated", "max_steps_so_far"])
    w.writerows(rows)
    (out / "aggregate.csv").write_text(buf.getvalue())
    claim = CLAIMS.get(args.generator, f"{args.generator}: scenario expectations")
    status = "PASS" if failures == 0 else "FAIL"
    print(f"{status} {claim} [{args.method}]: {len(rows) - failures}/{len(rows)} runs met expectations, "
          f"max steps {worst}")
    return 0 if failures == 0 else 1


def cmd_plot(args) -> int:
    try:
        path = Path(args.trace)
        if path.is_dir():
            path = path / "trace.json"
        data = json.loads(path.read_text())
        scn = Scenario.from_dict(data["scenario"])
        trace = IterationTrace.from_dict(data["trace"])
        points = [p for p, *_ in trace.rows() if p is not None]
        if args.style == "plane":
            if scn.dim != 2:
                raise DimensionMismatch("plane style needs a planar scenario")
            svg = render_plane(scn.set_a, scn.set_b, points)
        else:
            if scn.dim != 3 or not (isinstance(scn.set_a, ConeV) and isinstance(scn.set_b, ConeV)):
                raise DimensionMismatch("sphere style needs two cones in R^3")
            svg = render_sphere_orthographic(scn.set_a, scn.set_b, points)
        Path(args.out).write_text(svg)
    except (CircumfeasError, KeyError, TypeError, ValueError, OSError) as exc:
        return _error(exc)
    return 0


def _tolerance_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-iters", type=int, default=None)
    p.add_argument("--eps-feas", type=float, default=None)
    p.add_argument("--eps-degen", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="circumfeas", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario from one of its starting points")
    run.add_argument("--scenario", required=True, help="registry name, generator:seed, or JSON path")
    run.add_argument("--method", choices=METHODS, default="crm")
    run.add_argument("--start", type=int, default=0, help="index into the scenario's initial points")
    run.add_argument("--out", required=True)
    _tolerance_flags(run)
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="run generated scenarios over a seed range")
    sweep.add_argument("--generator", choices=sorted(GENERATORS), required=True)
    sweep.add_argument("--count", type=int, required=True)
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--method", choices=METHODS, default="crm")
    sweep.add_argument("--out", required=True)
    _tolerance_flags(sweep)
    sweep.set_defaults(func=cmd_sweep)

    plot = sub.add_parser("plot", help="render a trace.json as SVG")
    plot.add_argument("--trace", required=True)
    plot.add_argument("--style", choices=("plane", "sphere_orthographic"), default="plane")
    plot.add_argument("--out", required=True)
    plot.set_defaults(func=cmd_plot)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
