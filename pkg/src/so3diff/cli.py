"""Command-line front end: ``so3diff {exp,log,jac,check,bench,fit}``.

Exit codes: 0 success, 1 property failure, 2 parse error, 3 invalid rotation,
4 degenerate geometry, 5 singular solve.
"""

import argparse
import json
import re
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import bench, core, jacobians, properties, solver

EXIT_OK = 0
EXIT_PROPERTY = 1
EXIT_PARSE = 2
EXIT_ROTATION = 3
EXIT_DEGENERATE = 4
EXIT_SINGULAR = 5

DEFAULT_BANDS = ((1e-3, 0.1), (0.1, 3.0), (3.0, 3.14))


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # accept "-1e-3" and friends as positional numbers
        self._negative_number_matcher = re.compile(r"^-(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


class _UsageError(Exception):
    pass


def _band(text):
    try:
        lo, hi = (float(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"band must look like LO:HI, got {text!r}")
    return lo, hi


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS)
    common.add_argument("--format", choices=("json", "csv", "text"), default=argparse.SUPPRESS)

    parser = _Parser(prog="so3diff", parents=[common],
                     description="Rotations in exponential coordinates and their derivatives.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exp", parents=[common], help="rotation matrix of a rotation vector")
    p.add_argument("v", type=float, nargs=3)

    p = sub.add_parser("log", parents=[common], help="rotation vector of a rotation matrix")
    p.add_argument("m", type=float, nargs=9, help="matrix entries, row-major")

    p = sub.add_parser("jac", parents=[common], help="derivative of R(v) or R(v) u")
    p.add_argument("v", type=float, nargs=3)
    p.add_argument("--formula", choices=("compact", "classical", "fd"), default="compact")
    p.add_argument("--point", type=float, nargs=3, metavar=("X", "Y", "Z"))
    p.add_argument("--h", type=float, default=None, help="finite-difference step")

    p = sub.add_parser("check", parents=[common], help="randomized property suite")
    p.add_argument("--trials", type=int, default=100)

    p = sub.add_parser("bench", parents=[common], help="time and accuracy of dR/dv formulas")
    p.add_argument("--bands", type=_band, nargs="+", default=list(DEFAULT_BANDS),
                   metavar="LO:HI")
    p.add_argument("--trials", type=int, default=200)

    p = sub.add_parser("fit", parents=[common], help="fit a rotation to correspondences")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", metavar="FILE")
    src.add_argument("--synth", nargs=4, metavar=("N", "THETA", "SIGMA", "SEED"))
    p.add_argument("--method", choices=("gn", "gd", "gauss-newton", "gradient-descent"),
                   default="gn")
    p.add_argument("--v0", type=float, nargs=3, default=None)
    p.add_argument("--max-iter", type=int, default=100)
    return parser


def _json(obj):
    # json uses repr for floats: shortest string that round-trips exactly
    return json.dumps(obj)


def _text_matrix(M):
    return "\n".join(" ".join(f"{x:>13.6g}" for x in row) for row in np.asarray(M))


def _emit(fmt, payload, text):
    if fmt in (None, "json", "csv"):
        print(_json(payload))
    if fmt in (None, "text"):
        print(text)


def _cmd_exp(args, fmt):
    try:
        R = core.exp_rodrigues(args.v)
    except ValueError as exc:
        raise _UsageError(str(exc))
    _emit(fmt, core.matrix_to_json(R), _text_matrix(R))
    return EXIT_OK


def _cmd_log(args, fmt):
    M = np.array(args.m, dtype=float).reshape(3, 3)
    try:
        aa = core.log_axis_angle(M)
    except core.NotARotation as exc:
        print(f"NotARotation ({exc.invariant}): {exc}", file=sys.stderr)
        return EXIT_ROTATION
    v = aa.rotation_vector()
    payload = {"v": core.vector_to_json(v), "axis": core.vector_to_json(aa.axis),
               "angle": aa.angle}
    text = (f"v     = {' '.join(f'{x:.6g}' for x in v)}\n"
            f"axis  = {' '.join(f'{x:.6g}' for x in aa.axis)}\n"
            f"angle = {aa.angle:.6g}")
    _emit(fmt, payload, text)
    return EXIT_OK


def _cmd_jac(args, fmt):
    try:
        v = core.as_vector3(args.v)
        if args.point is not None:
            u = core.as_vector3(args.point)
            J = {"compact": lambda: jacobians.dpoint_compact(v, u),
                 "classical": lambda: jacobians.dpoint_classical(v, u),
                 "fd": lambda: jacobians.fd_dpoint(v, u, args.h)}[args.formula]()
            payload = {"formula": args.formula, "v": core.vector_to_json(v),
                       "point": core.vector_to_json(u), "jacobian": core.matrix_to_json(J)}
            text = f"d(R u)/dv, column i = d/dv_i\n{_text_matrix(J)}"
        else:
            D = {"compact": lambda: jacobians.drot_compact(v),
                 "classical": lambda: jacobians.drot_classical(v),
                 "fd": lambda: jacobians.fd_drot(v, args.h)}[args.formula]()
            payload = {"formula": args.formula, "v": core.vector_to_json(v),
                       "blocks": [core.matrix_to_json(Di) for Di in D]}
            text = "\n".join(f"dR/dv_{i + 1}\n{_text_matrix(D[i])}" for i in range(3))
    except ValueError as exc:
        raise _UsageError(str(exc))
    _emit(fmt, payload, text)
    return EXIT_OK


def _cmd_check(args, fmt, seed, jobs):
    if args.trials < 1:
        raise _UsageError("--trials must be at least 1")
    rows = properties.run_suite(args.trials, seed=seed, jobs=jobs)
    if fmt == "json":
        print(_json([{"property": n, "trials": t, "max_residual": w, "tolerance": tol,
                      "status": "pass" if ok else "fail"} for n, t, w, tol, ok in rows]))
    else:
        print("property,trials,max_residual,tolerance,status")
        for n, t, w, tol, ok in rows:
            print(f"{n},{t},{w:.17g},{tol:g},{'pass' if ok else 'fail'}")
    failed = [n for n, *_, ok in rows if not ok]
    for n in failed:
        print(f"property violated: {n}", file=sys.stderr)
    return EXIT_PROPERTY if failed else EXIT_OK


def _bench_band(job):
    k, band, trials, seed = job
    records = bench.run_bench([band], trials, seed=seed)
    return k, records


def _cmd_bench(args, fmt, seed, jobs):
    if args.trials < 1:
        raise _UsageError("--trials must be at least 1")
    for lo, hi in args.bands:
        if not 0.0 < lo < hi < np.pi:
            raise _UsageError(f"band {lo}:{hi} must lie inside (0, pi)")
    # distinct per-band seeds so results do not depend on --jobs
    work = [(k, band, args.trials, seed * 1000003 + k) for k, band in enumerate(args.bands)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_bench_band, work))
    else:
        results = [_bench_band(w) for w in work]
    records = [r for _, recs in sorted(results, key=lambda x: x[0]) for r in recs]
    if fmt == "json":
        print(_json([r.to_dict() for r in records]))
    else:
        print(bench.CSV_HEADER)
        for r in records:
            print(r.csv_row())
    return EXIT_OK


def _cmd_fit(args, fmt):
    v_true = None
    try:
        if args.input is not None:
            with open(args.input) as fh:
                c = solver.CorrespondenceSet.from_json(fh.read())
        else:
            n, theta, sigma, seed = args.synth
            n, theta, sigma, seed = int(n), float(theta), float(sigma), int(seed)
            direction = properties.random_unit(np.random.default_rng([seed, 1]))
            v_true = theta * direction
            c = solver.synthesize(n, v_true, sigma, seed)
    except solver.DegenerateGeometry as exc:
        print(f"DegenerateGeometry: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (OSError, ValueError, TypeError) as exc:
        raise _UsageError(f"bad input: {exc}")

    try:
        report = solver.solve(c, args.v0, method=args.method, max_iter=args.max_iter)
    except solver.SingularNormalEquations as exc:
        print(f"SingularNormalEquations: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    out = report.to_dict()
    if v_true is not None:
        out["v_true"] = core.vector_to_json(v_true)
        out["angle_error"] = solver.rotation_angle_error(report.v_hat, v_true)
    if fmt == "text":
        print(f"method     {out['method']}\nconverged  {out['converged']}\n"
              f"iterations {out['iterations']}\n"
              f"v_hat      {' '.join(f'{x:.6g}' for x in report.v_hat)}\n"
              f"cost       {out['residual_history'][-1]:.6g}")
        if v_true is not None:
            print(f"angle err  {out['angle_error']:.6g}")
    else:
        print(_json(out))
    return EXIT_OK


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)  # exits 2 on parse errors
    fmt = getattr(args, "format", None)
    seed = getattr(args, "seed", 0)
    jobs = max(1, getattr(args, "jobs", 1))
    try:
        if args.command == "exp":
            return _cmd_exp(args, fmt)
        if args.command == "log":
            return _cmd_log(args, fmt)
        if args.command == "jac":
            return _cmd_jac(args, fmt)
        if args.command == "check":
            return _cmd_check(args, fmt, seed, jobs)
        if args.command == "bench":
            return _cmd_bench(args, fmt, seed, jobs)
        return _cmd_fit(args, fmt)
    except _UsageError as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
