"""Turn profiles and trajectories into pass/fail verdicts.

Derivatives are centered differences on the sampled profile (one-sided at the
ends).  They are deliberately independent of the flux discretisation used by
the solver.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .envelopes import Barrier, GradientEnvelope, a_priori_A0
from .params import DerivedConstants, ProblemParams, chi, derive_constants
from .solver import RadialField, Trajectory
from .steady import SteadyState, theta_from_max

ZERO_SUP = 1e-10


@dataclass
class Check:
    name: str
    passed: bool
    measured: float
    threshold: float
    note: str = ""

    def __post_init__(self):
        self.passed = bool(self.passed)

    def to_dict(self):
        d = {"name": self.name, "passed": bool(self.passed),
             "measured": _num(self.measured), "threshold": _num(self.threshold)}
        if self.note:
            d["note"] = self.note
        return d

    def __bool__(self):
        return bool(self.passed)


def _num(x):
    x = float(x)
    return x if math.isfinite(x) else repr(x)


@dataclass
class ProfileDiagnostics:
    r: np.ndarray
    derivative: np.ndarray
    scaled_derivative: np.ndarray
    first_integral: np.ndarray
    flux: np.ndarray


def centered_derivative(values: np.ndarray, h: float) -> np.ndarray:
    d = np.empty_like(values)
    d[1:-1] = (values[2:] - values[:-2]) / (2 * h)
    d[0] = (values[1] - values[0]) / h
    d[-1] = (values[-1] - values[-2]) / h
    return d


def profile_diagnostics(fld: RadialField, params: ProblemParams,
                        consts: DerivedConstants | None = None) -> ProfileDiagnostics:
    if fld.grid.n < 16:
        raise ValueError("profile diagnostics need at least 16 cells")
    consts = consts or derive_constants(params)
    r = fld.grid.nodes
    du = centered_derivative(fld.values, fld.grid.h)
    beta, p, dim = consts.beta, params.p, params.dim
    return ProfileDiagnostics(
        r=r,
        derivative=du,
        scaled_derivative=r ** ((dim - 1) / (p - 1)) * du,
        first_integral=r ** (beta - 1) * chi(du, params) + r ** beta / beta,
        flux=r ** (dim - 1) * np.abs(du) ** (p - 2) * du,
    )


def _nonincreasing(name, arr, tol):
    rise = float(np.max(np.diff(arr))) if len(arr) > 1 else 0.0
    return Check(name, rise <= tol, rise, tol)


def check_scaled_derivative_monotone(diag: ProfileDiagnostics, tol: float = 1e-6) -> Check:
    """``r^((N-1)/(p-1)) u_r`` must be non-increasing."""
    return _nonincreasing("scaled_derivative_monotone", diag.scaled_derivative, tol)


def check_flux_monotone(diag: ProfileDiagnostics, tol: float = 1e-6) -> Check:
    """``r^(N-1) |u_r|^(p-2) u_r`` must be non-increasing."""
    return _nonincreasing("flux_monotone", diag.flux, tol)


def first_integral_spread(fld: RadialField, params: ProblemParams, r_lo: float, r_hi: float) -> float:
    """Sample variance of the first integral over the nodes in ``(r_lo, r_hi)``."""
    d = profile_diagnostics(fld, params)
    sel = (d.r > r_lo) & (d.r < r_hi)
    if sel.sum() < 2:
        return 0.0
    return float(np.var(d.first_integral[sel], ddof=1))


# -- trajectory-level checks -------------------------------------------------

def solver_checks(traj: Trajectory, params: ProblemParams, *, mono_rel: float = 1e-6,
                  neg_tol: float = 1e-12, grad_rel: float = 0.05, env_rel: float = 0.05) -> list[Check]:
    """Non-negativity, boundedness, monotone sup norm and gradient bounds."""
    u0 = traj.states[0]
    h = traj.grid.h
    sup0 = float(np.max(np.abs(u0)))
    lip0 = float(np.max(np.abs(np.diff(u0)))) / h
    sups = traj.sup_norms
    checks = [
        Check("nonnegative", float(traj.states.min()) >= -neg_tol, float(traj.states.min()), -neg_tol),
        Check("bounded", float(traj.states.max()) <= sup0 + traj.epsilon,
              float(traj.states.max()), sup0 + traj.epsilon),
    ]
    rise = float(np.max(np.diff(sups))) if len(sups) > 1 else 0.0
    checks.append(Check("sup_norm_nonincreasing", rise <= mono_rel * sup0, rise, mono_rel * sup0))

    A0 = a_priori_A0(sup0, lip0, params)
    gmin = float(traj.grad_min.min())
    checks.append(Check("gradient_lower_bound", gmin >= -(1 + grad_rel) * A0, gmin, -(1 + grad_rel) * A0))

    if lip0 > 0:
        env = GradientEnvelope(params, 2.0 * lip0)
        W = env.values(traj.times)
        excess = float(np.max(traj.grad_max - W))
        checks.append(Check("gradient_envelope", excess <= env_rel * env.W0, excess, env_rel * env.W0))
    else:
        checks.append(Check("gradient_envelope", True, 0.0, 0.0, note="zero initial data"))
    return checks


def barrier_check(traj: Trajectory, barrier: Barrier, rel_tol: float = 5e-3) -> Check:
    """``u(x, t) >= v_lambda(|x - x0|)`` on the barrier ball at every sample.

    A node at radius r meets the ball at distances ``|r - x0|`` and up; the
    barrier is largest at the smallest one.
    """
    r = traj.grid.nodes
    s = np.abs(r - barrier.x0)
    inside = s < barrier.lam
    v = barrier.value(s[inside])
    deficit = float(np.max(v[None, :] - traj.states[:, inside]))
    tol = rel_tol * barrier.sup()
    return Check("barrier_domination", deficit <= tol, deficit, tol)


def comparison_check(lower: Trajectory, upper: Trajectory, tol: float = 1e-6) -> Check:
    if lower.states.shape != upper.states.shape or not np.allclose(lower.times, upper.times):
        raise ValueError("trajectories must share grid and sample times")
    excess = float(np.max(lower.states - upper.states))
    return Check("comparison_ordering", excess <= tol, excess, tol)


# -- convergence report -----------------------------------------------------

@dataclass
class ConvergenceReport:
    M_inf_est: float
    theta_fit: float
    times: np.ndarray
    distance_series: np.ndarray
    converged: bool
    checks: list[Check] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def final_distance(self) -> float:
        return float(self.distance_series[-1])

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "M_inf_est": self.M_inf_est,
            "theta_fit": self.theta_fit,
            "converged": bool(self.converged),
            "final_distance": self.final_distance,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "notes": list(self.notes),
        }


def convergence_report(traj: Trajectory, params: ProblemParams, consts: DerivedConstants | None = None,
                       tail_fraction: float = 0.25, conv_tol: float = 5e-3,
                       tail_slack: float = 0.1, quad_tol: float = 1e-12) -> ConvergenceReport:
    """Estimate the limiting plateau height and measure the distance to the
    matching steady state along the trajectory.

    Finite-horizon surrogates (``tail_fraction``, ``conv_tol``) are artifact
    choices; the long-time statement itself gives no rate.
    """
    consts = consts or derive_constants(params)
    if not 0 < tail_fraction <= 0.5:
        raise ValueError("tail_fraction must lie in (0, 0.5]")
    if len(traj) < 8:
        raise ValueError(f"horizon too short: {len(traj)} output times, need at least 8")
    k = max(2, int(math.ceil(tail_fraction * len(traj))))
    sups = traj.sup_norms
    M = float(np.mean(sups[-k:]))
    notes = ["tail_fraction and conv_tol are finite-horizon choices, not rates"]

    if M < ZERO_SUP:
        theta, w = 1.0, np.zeros(traj.grid.n + 1)
        notes.append("degenerate zero limit: theta = 1 without bisection")
    elif M > consts.max_height:
        theta = 0.0
        w = SteadyState(params, 0.0, quad_tol).value(traj.grid.nodes)
        notes.append("tail sup norm exceeds c0/alpha; no steady state matches yet")
    else:
        theta = theta_from_max(M, params, quad_tol=quad_tol)
        w = SteadyState(params, theta, quad_tol).value(traj.grid.nodes)

    dist = np.max(np.abs(traj.states - w[None, :]), axis=1)
    tail = dist[-k:]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(tail[:-1] > 1e-14, tail[1:] / tail[:-1], 1.0)
    worst = float(np.max(ratios)) if len(ratios) else 1.0
    checks = [
        Check("tail_distance_nonincreasing", worst <= 1 + tail_slack, worst - 1.0, tail_slack),
        Check("final_distance", dist[-1] <= conv_tol, float(dist[-1]), conv_tol),
    ]
    if M >= ZERO_SUP:
        checks.append(Check("theta_in_range", 0.0 <= theta < 1.0 and M <= consts.max_height,
                            theta, 1.0))
    converged = all(c.passed for c in checks)
    return ConvergenceReport(M, theta, traj.times.copy(), dist, converged, checks, notes)
