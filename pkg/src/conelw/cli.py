"""Command line driver: ``conelw {verify,solve,green} INSTANCE.json``.

Exit codes: 0 success, 1 the theory does not apply or its conclusion was
not reproduced (a report is still written), 2 structural errors (unreadable
or invalid instance, singular kernel for ``green``).
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from contextlib import contextmanager
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .cone import classify, theta
from .green import InadmissibleLambda, build_kernel, check_invariants, G
from .hypotheses import check_hypotheses
from .problem import InstanceError, derive_constants, instance_hash, load_instance, validate
from .shooting import solve_all

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


class _Timer:
    def __init__(self):
        self.timings = {}

    @contextmanager
    def stage(self, name):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = time.perf_counter() - start


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (tuple, set, frozenset)):
        return list(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _emit(report, out):
    text = json.dumps(report, indent=2, sort_keys=True, default=_json_default) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load(args):
    inst, thr, settings = load_instance(args.instance)
    settings = settings.replace(grid=args.grid, scan_points=args.scan_points,
                                ode_steps=args.ode_steps, root_tol=args.root_tol,
                                residual_tol=args.residual_tol, strict_eps=args.strict_eps)
    return inst, thr, settings


def _base_report(command, inst, thr, settings):
    return {
        "command": command,
        "version": __version__,
        "instance": {"hash": instance_hash(inst, thr, settings), **inst.to_dict()},
        "thresholds": thr.to_dict(),
        "settings": asdict(settings),
    }


def _verify_stages(inst, thr, settings, report, timer):
    """validate -> kernel -> constants -> hypotheses. Returns (exit, kernel, hyp)."""
    with timer.stage("validate"):
        violations = validate(inst, thr, settings.grid)
    report["violations"] = [v.to_dict() for v in violations]
    if violations:
        return EXIT_ERROR, None, None
    try:
        with timer.stage("kernel"):
            kernel = build_kernel(inst.p, inst.lam, settings.quad_panels)
        with timer.stage("constants"):
            consts = derive_constants(inst, thr, kernel, settings.grid, settings.quad_panels)
    except InadmissibleLambda as exc:
        report["inadmissible_lambda"] = {"message": str(exc), **exc.details}
        return EXIT_FAIL, None, None
    report["constants"] = consts.to_dict()
    with timer.stage("hypotheses"):
        hyp = check_hypotheses(inst, thr, consts, settings.grid, settings.strict_eps)
    report["hypotheses"] = hyp.to_dict()
    return (EXIT_OK if hyp.all_hold else EXIT_FAIL), kernel, hyp


def cmd_verify(args) -> int:
    try:
        inst, thr, settings = _load(args)
    except InstanceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    timer = _Timer()
    report = _base_report("verify", inst, thr, settings)
    code, _, _ = _verify_stages(inst, thr, settings, report, timer)
    report["timings"] = timer.timings
    _emit(report, args.out)
    return code


def cmd_solve(args) -> int:
    try:
        inst, thr, settings = _load(args)
    except InstanceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    timer = _Timer()
    report = _base_report("solve", inst, thr, settings)
    code, _, hyp = _verify_stages(inst, thr, settings, report, timer)
    if code == EXIT_ERROR:
        report["timings"] = timer.timings
        _emit(report, args.out)
        return code

    with timer.stage("solve"):
        result = solve_all(inst, thr, settings)
    with timer.stage("classify"):
        loc = classify(result.solutions, thr)

    if args.csv_dir:
        csv_dir = Path(args.csv_dir)
    elif args.out:
        csv_dir = Path(args.out).resolve().parent
    else:
        csv_dir = Path.cwd()
    stem = Path(args.out).stem if args.out else Path(args.instance).stem
    csv_dir.mkdir(parents=True, exist_ok=True)
    solutions = []
    for k, (curve, res, loc_k) in enumerate(zip(result.solutions, result.residuals,
                                                 loc.solutions), 1):
        path = csv_dir / f"{stem}_solution_{k}.csv"
        curve.to_csv(path)
        solutions.append({**curve.metadata(), "theta": theta(curve),
                          "bucket": loc_k.bucket, "residuals": res, "csv": path.name})
    report["scan"] = result.profile.to_dict()
    report["solutions"] = solutions
    report["rejected"] = result.rejected
    report["localization"] = loc.to_dict()

    hypotheses_hold = code == EXIT_OK
    notes = []
    if hypotheses_hold and not loc.theorem_satisfied:
        notes.append(f"possible missed roots: scan used {settings.scan_points} points on "
                     "[0, C]; roots of even multiplicity or closer than the scan spacing "
                     "can be missed")
    report["notes"] = notes
    report["timings"] = timer.timings
    _emit(report, args.out)
    return EXIT_OK if hypotheses_hold and loc.theorem_satisfied else EXIT_FAIL


def cmd_green(args) -> int:
    try:
        inst, thr, settings = _load(args)
        kernel = build_kernel(inst.p, inst.lam, settings.quad_panels)
    except InstanceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except InadmissibleLambda as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    t = np.linspace(0.0, 1.0, args.t)
    s = np.linspace(0.0, 1.0, args.s)
    tt, ss = np.meshgrid(t, s, indexing="ij")
    values = G(kernel, tt, ss)
    lines = ["t,s,G"]
    for ti, si, gi in zip(tt.ravel(), ss.ravel(), np.ravel(values)):
        lines.append(f"{ti:.17g},{si:.17g},{gi:.17g}")
    table = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(table, encoding="utf-8")
    else:
        sys.stdout.write(table)

    checks = check_invariants(kernel)
    summary = {
        "lam": kernel.lam, "expP1": kernel.expP1, "denom": kernel.denom,
        "invariants": {name: {"max_error": err, "tolerance": tol, "passed": ok}
                       for name, (err, tol, ok) in checks.items()},
    }
    text = json.dumps(summary, indent=2, sort_keys=True) + "\n"
    if args.summary:
        Path(args.summary).write_text(text, encoding="utf-8")
    else:
        sys.stderr.write(text)
    return EXIT_OK if all(ok for _, _, ok in checks.values()) else EXIT_FAIL


def build_parser():
    parser = argparse.ArgumentParser(
        prog="conelw",
        description="Green's kernel, hypothesis checks and three-solution search "
                    "for y' - p y = sum f_i, lam y(0) = y(1) + sum Phi_j(tau_j, y(tau_j)).")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("instance", help="problem instance JSON file")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--grid", type=int, help="sampling lattice resolution")
        p.add_argument("--scan-points", type=int, help="shooting scan points on [0, C]")
        p.add_argument("--ode-steps", type=int, help="RK4 steps on [0, 1]")
        p.add_argument("--root-tol", type=float, help="bisection width")
        p.add_argument("--residual-tol", type=float, help="residual acceptance threshold")
        p.add_argument("--strict-eps", type=float,
                       help="margin required for the strict conditions F1, F2")

    p_verify = sub.add_parser("verify", help="check hypotheses only")
    common(p_verify)
    p_verify.set_defaults(func=cmd_verify)

    p_solve = sub.add_parser("solve", help="check hypotheses, find and classify solutions")
    common(p_solve)
    p_solve.add_argument("--csv-dir", help="directory for solution CSVs "
                                           "(default: next to --out, else cwd)")
    p_solve.set_defaults(func=cmd_solve)

    p_green = sub.add_parser("green", help="tabulate the Green's kernel")
    common(p_green)
    p_green.add_argument("--t", type=int, default=11, help="number of t nodes")
    p_green.add_argument("--s", type=int, default=11, help="number of s nodes")
    p_green.add_argument("--summary", help="invariant summary JSON (default: stderr)")
    p_green.set_defaults(func=cmd_green)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
