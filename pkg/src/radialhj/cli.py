"""Command-line entry point: ``radialhj {steady,invert,simulate,verify,sweep}``."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig, load_config, load_sweep
from .params import ParameterError, ProblemParams, derive_constants
from .runner import error_dict, run_simulation, run_sweep, write_error, write_run
from .steady import SteadyState, max_value, theta_from_max
from .verify import SUITES, run_suite

EXIT_OK, EXIT_CHECKS, EXIT_ERROR = 0, 1, 2


def _problem(args) -> ProblemParams:
    if args.config:
        return load_config(args.config).params
    return ProblemParams(args.p, args.q, args.dim)


def _fail(exc: BaseException, out: str | None = None) -> int:
    if out:
        write_error(exc, out)
    print(json.dumps(error_dict(exc), sort_keys=True), file=sys.stderr)
    return EXIT_ERROR


def cmd_steady(args) -> int:
    params = _problem(args)
    if args.max_value is not None:
        theta = theta_from_max(args.max_value, params)
        print(f"theta = {theta!r}", file=sys.stderr)
    else:
        theta = args.theta
    w = SteadyState(params, theta)
    r = np.linspace(0.0, 1.0, args.samples)
    vals, ders = w.value(r), w.derivative(r)
    res = np.full_like(r, np.nan)
    inside = (r > theta) & (r < 1.0) if theta < 1 else np.zeros_like(r, dtype=bool)
    if inside.any():
        res[inside] = w.first_integral_residual(r[inside])
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["r", "w", "dw", "first_integral_residual"])
        for row in zip(r, vals, ders, res):
            wr.writerow(["" if np.isnan(x) else repr(float(x)) for x in row])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def cmd_invert(args) -> int:
    params = _problem(args)
    if args.max_value is not None:
        print(repr(theta_from_max(args.max_value, params)))
    else:
        print(repr(max_value(params, args.theta)))
    return EXIT_OK


def cmd_simulate(args) -> int:
    out = args.out
    try:
        cfg = load_config(args.config) if args.config else RunConfig()
        out = out or cfg.out_dir
        res = run_simulation(cfg)
    except Exception as exc:
        return _fail(exc, out)
    write_run(res, out)
    print(json.dumps(res.report.to_dict(), sort_keys=True))
    return EXIT_OK if res.passed else EXIT_CHECKS


def cmd_verify(args) -> int:
    checks = run_suite(args.suite)
    doc = {"schema": 1, "suite": args.suite, "passed": all(checks),
           "checks": [c.to_dict() for c in checks]}
    print(json.dumps(doc, indent=2, sort_keys=True))
    return EXIT_OK if doc["passed"] else EXIT_CHECKS


def cmd_sweep(args) -> int:
    spec = load_sweep(args.config, args.jobs)
    out = Path(args.out) if args.out else Path(spec.base.out_dir) / "sweep.csv"
    if out.suffix != ".csv":
        out = out / "sweep.csv"
    rows = run_sweep(spec, out)
    print(out)
    return EXIT_OK if all(r["passed"] is True for r in rows) else EXIT_CHECKS


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="radialhj", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def problem_flags(sp):
        sp.add_argument("--config", help="INI run config (its [problem] section is used)")
        sp.add_argument("--p", type=float, default=2.0)
        sp.add_argument("--q", type=float, default=0.5)
        sp.add_argument("--dim", type=int, default=2)
        g = sp.add_mutually_exclusive_group(required=True)
        g.add_argument("--theta", type=float)
        g.add_argument("--max-value", type=float)

    sp = sub.add_parser("steady", help="tabulate a steady state as CSV")
    problem_flags(sp)
    sp.add_argument("--samples", type=int, default=101)
    sp.add_argument("--out", help="CSV path (default stdout)")
    sp.set_defaults(func=cmd_steady)

    sp = sub.add_parser("invert", help="map theta to the maximum, or a maximum back to theta")
    problem_flags(sp)
    sp.set_defaults(func=cmd_invert)

    sp = sub.add_parser("simulate", help="run one configured simulation")
    sp.add_argument("--config")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("verify", help="run an invariant suite")
    sp.add_argument("--suite", required=True, choices=sorted(SUITES))
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("sweep", help="run a parameter sweep")
    sp.add_argument("--config", required=True)
    sp.add_argument("--out")
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ParameterError, ValueError) as exc:
        return _fail(exc)


if __name__ == "__main__":
    sys.exit(main())
