"""Run a configured simulation, persist its artifacts, and drive sweeps."""
from __future__ import annotations

import csv
import json
import logging
import math
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import profiles
from .config import RunConfig, SweepSpec, serialize_config
from .diagnostics import Check, ConvergenceReport, convergence_report, solver_checks
from .envelopes import a0_window_ok, a_priori_A0
from .solver import RadialGrid, RegularizedCoefficients, Trajectory, grid_epsilon, solve

log = logging.getLogger(__name__)

SCHEMA = 1


@dataclass
class RunResult:
    config: RunConfig
    epsilon: float
    trajectory: Trajectory
    report: ConvergenceReport
    checks: list[Check] = field(default_factory=list)

    @property
    def all_checks(self) -> list[Check]:
        return list(self.checks) + list(self.report.checks)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.all_checks)


def resolve_epsilon(cfg: RunConfig) -> float:
    return grid_epsilon(cfg.n, cfg.q) if cfg.epsilon is None else cfg.epsilon


def initial_field(cfg: RunConfig):
    grid = RadialGrid(cfg.n)
    return profiles.build(cfg.profile, grid, cfg.params, theta=cfg.theta, scale=cfg.scale,
                          amplitude=cfg.amplitude, center=cfg.center, width=cfg.width,
                          height=cfg.height, path=cfg.path)


def run_simulation(cfg: RunConfig) -> RunResult:
    cfg.validate()
    eps = resolve_epsilon(cfg)
    u0 = initial_field(cfg)
    lip0 = float(np.max(np.abs(np.diff(u0.values)))) / u0.grid.h
    A0 = a_priori_A0(u0.sup_norm, lip0, cfg.params)
    if not a0_window_ok(A0, eps):
        raise ValueError(f"epsilon={eps:g} is too large: the bound constant A0={A0:g} "
                         f"falls outside (sqrt(3) eps, eps^-1/2)")
    coeffs = RegularizedCoefficients(eps, cfg.params)
    times = np.linspace(0.0, cfg.t_end, cfg.outputs + 1)[1:]
    traj = solve(u0, coeffs, cfg.t_end, times, dt=cfg.dt, scheme=cfg.scheme)
    tol = cfg.tolerances
    checks = solver_checks(traj, cfg.params, mono_rel=tol.mono_rel, grad_rel=tol.grad_rel,
                           env_rel=tol.env_rel)
    report = convergence_report(traj, cfg.params, tail_fraction=tol.tail_fraction,
                                conv_tol=tol.conv_tol)
    return RunResult(cfg, eps, traj, report, checks)


# -- writers ------------------------------------------------------------------

def _dump_json(obj, path: Path):
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def write_trajectory_csv(traj: Trajectory, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["time", "r", "u"])
        r = traj.grid.nodes
        for t, row in zip(traj.times, traj.states):
            for ri, ui in zip(r, row):
                w.writerow([repr(float(t)), repr(float(ri)), repr(float(ui))])


def write_distance_csv(report: ConvergenceReport, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["time", "distance"])
        for t, d in zip(report.times, report.distance_series):
            w.writerow([repr(float(t)), repr(float(d))])


def summary_dict(res: RunResult, timestamp: str | None = None) -> dict:
    traj = res.trajectory
    return {
        "schema": SCHEMA,
        "config": {k: v for k, v in asdict(res.config).items()},
        "epsilon": res.epsilon,
        "times": traj.times.tolist(),
        "sup_norms": traj.sup_norms.tolist(),
        "grad_min": traj.grad_min.tolist(),
        "grad_max": traj.grad_max.tolist(),
        "stats": traj.stats,
        "checks": [c.to_dict() for c in res.checks],
        "passed": res.passed,
        "metadata": {"timestamp": timestamp or datetime.now(timezone.utc).isoformat()},
    }


def write_run(res: RunResult, out_dir, timestamp: str | None = None) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.ini").write_text(serialize_config(res.config))
    write_trajectory_csv(res.trajectory, out / "trajectory.csv")
    write_distance_csv(res.report, out / "distance.csv")
    _dump_json(summary_dict(res, timestamp), out / "summary.json")
    _dump_json(res.report.to_dict(), out / "report.json")
    return out


def error_dict(exc: BaseException) -> dict:
    return {"schema": SCHEMA, "error": type(exc).__name__, "message": str(exc)}


def write_error(exc: BaseException, out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _dump_json(error_dict(exc), out / "error.json")
    return out / "error.json"


# -- sweeps ---------------------------------------------------------------------

ROW_BASE = ["key", "p", "q", "N", "n", "epsilon", "theta_init", "theta_fit", "final_distance",
            "passed", "error"]


def result_row(res: RunResult) -> dict:
    cfg = res.config
    row = {"key": cfg.key(), "p": cfg.p, "q": cfg.q, "N": cfg.dim, "n": cfg.n,
           "epsilon": res.epsilon, "theta_init": cfg.theta if cfg.profile == "steady" else "",
           "theta_fit": res.report.theta_fit, "final_distance": res.report.final_distance,
           "passed": res.passed, "error": ""}
    for c in res.all_checks:
        row[f"{c.name}"] = c.measured
    return row


def _sweep_task(cfg: RunConfig) -> dict:
    try:
        res = run_simulation(cfg)
        write_run(res, cfg.out_dir, timestamp="")
        return result_row(res)
    except Exception as exc:  # recorded per row, the sweep goes on
        log.debug("run %s failed:\n%s", cfg.key(), traceback.format_exc())
        try:
            write_error(exc, cfg.out_dir)
        except OSError:
            pass
        return {"key": cfg.key(), "p": cfg.p, "q": cfg.q, "N": cfg.dim, "n": cfg.n,
                "epsilon": "", "theta_init": "", "theta_fit": "", "final_distance": "",
                "passed": False, "error": f"{type(exc).__name__}: {exc}"}


def _fmt(v):
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else str(v)
    return str(v)


def run_sweep(spec: SweepSpec, out_csv) -> list[dict]:
    cfgs = spec.expand()
    if spec.jobs > 1 and len(cfgs) > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            rows = list(pool.map(_sweep_task, cfgs))
    else:
        rows = [_sweep_task(c) for c in cfgs]
    rows.sort(key=lambda r: r["key"])
    extra = sorted({k for r in rows for k in r} - set(ROW_BASE))
    cols = ROW_BASE + extra
    out_csv = Path(out_csv)
    out_csv.parent.mkdir(parents=True, exist_ok=True)
    with open(out_csv, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([_fmt(r.get(c, "")) for c in cols])
    return rows
