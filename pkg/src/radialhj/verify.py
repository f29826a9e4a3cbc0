"""Invariant suites exposed through ``radialhj verify``.

Each suite returns a list of :class:`Check` with measured slacks.  Random
draws use a fixed seed so repeated runs are identical.
"""
from __future__ import annotations

import numpy as np

from .diagnostics import (Check, barrier_check, check_flux_monotone, check_scaled_derivative_monotone,
                          convergence_report, profile_diagnostics, solver_checks)
from .envelopes import Barrier, GradientEnvelope, a_priori_A0, lambda_m
from .params import ProblemParams, derive_constants
from .solver import RadialField, RadialGrid, RegularizedCoefficients, grid_epsilon, solve
from .steady import SteadyState, max_value, theta_from_max

SEED = 20240611


def random_params(rng: np.random.Generator) -> ProblemParams:
    p = rng.uniform(2.0, 5.0)
    q = rng.uniform(0.05, 0.95) * (p - 1.0)
    return ProblemParams(p, q, int(rng.integers(2, 6)))


def steady_family() -> list[Check]:
    rng = np.random.default_rng(SEED)
    P = ProblemParams(2.0, 0.5, 2)
    c = derive_constants(P)
    r = rng.uniform(0, 1, 200)
    closed = c.max_height * (1 - r ** c.alpha)
    err = float(np.max(np.abs(SteadyState(P, 0.0).value(r) - closed)))
    checks = [Check("closed_form_theta0", err <= 1e-10, err, 1e-10)]

    worst = 0.0
    for _ in range(50):
        Q = random_params(rng)
        beta = derive_constants(Q).beta
        for th in (0.0, 0.25, 0.5, 0.75):
            rr = rng.uniform(th + 1e-3, 1 - 1e-3, 20)
            res = SteadyState(Q, th).first_integral_residual(rr)
            worst = max(worst, float(np.max(np.abs(res))))
    checks.append(Check("first_integral_identity", worst <= 1e-8, worst, 1e-8))

    thetas = rng.uniform(0, 1, 20)
    rt = max(abs(theta_from_max(max_value(P, t), P) - t) for t in thetas)
    checks.append(Check("max_map_round_trip", rt <= 1e-8, rt, 1e-8))
    ends = abs(theta_from_max(c.max_height, P)) + abs(theta_from_max(0.0, P) - 1.0)
    checks.append(Check("max_map_endpoints", ends == 0.0, ends, 0.0))

    grid = RadialGrid(256)
    worst = 0.0
    for th in np.linspace(0, 0.9, 10):
        d = profile_diagnostics(RadialField(grid, SteadyState(P, th).value(grid.nodes)), P)
        worst = max(worst, check_scaled_derivative_monotone(d).measured, check_flux_monotone(d).measured)
    checks.append(Check("steady_profiles_monotone", worst <= 1e-6, worst, 1e-6))
    return checks


def envelopes() -> list[Check]:
    P = ProblemParams(3.0, 1.0, 2)
    env = GradientEnvelope(P, 1.0)
    w1 = env.closed_form(1.0)
    checks = [Check("envelope_closed_form", abs(w1 - 0.5) <= 1e-15, abs(w1 - 0.5), 1e-15)]
    t = np.linspace(0, 10, 201)
    rel = float(np.max(np.abs(GradientEnvelope(P, 1.0, 1e-5).values(t) / env.values(t) - 1)))
    checks.append(Check("envelope_rk4_agreement", rel <= 1e-3, rel, 1e-3))
    Q = ProblemParams(2.0, 0.5, 2)
    b = Barrier(Q, 0.5)
    s = np.linspace(0.01, 0.49, 49)
    res = float(np.max(np.abs(b.stationarity_residual(s))))
    checks.append(Check("barrier_stationary", res <= 1e-8, res, 1e-8))
    a0 = a_priori_A0(0.0, 0.0, Q)
    checks.append(Check("A0_zero_data", a0 == 6.0, a0, 6.0))
    return checks


def _run(P, n, fn, t_end, outputs=20, dt=1e-3):
    grid = RadialGrid(n)
    u0 = RadialField.from_function(grid, fn)
    coeffs = RegularizedCoefficients(grid_epsilon(n, P.q), P)
    return solve(u0, coeffs, t_end, np.linspace(0, t_end, outputs + 1)[1:], dt=dt)


def solver_properties() -> list[Check]:
    P = ProblemParams(2.0, 0.5, 2)
    out = []
    for label, fn in (("zero", lambda r: 0 * r),
                      ("parabolic", lambda r: 0.01 * (1 - r * r)),
                      ("bump", lambda r: 0.01 * np.where(abs(r - 0.5) < 0.25, (1 - ((r - 0.5) / 0.25) ** 2) ** 2, 0))):
        traj = _run(P, 128, fn, 0.5)
        for c in solver_checks(traj, P):
            c.name = f"{label}:{c.name}"
            out.append(c)
    return out


def convergence() -> list[Check]:
    P = ProblemParams(2.0, 0.5, 2)
    fn = lambda r: 0.01 * (1 - r * r)
    t_short = _run(P, 512, fn, 2.0, outputs=40)
    t_long = _run(P, 512, fn, 4.0, outputs=40)
    rep = convergence_report(t_short, P)
    rep_long = convergence_report(t_long, P)
    M = rep.M_inf_est
    out = list(rep.checks)
    out.append(Check("final_distance_relative", rep.final_distance <= 0.1 * M, rep.final_distance, 0.1 * M))
    dth = abs(rep.theta_fit - rep_long.theta_fit)
    out.append(Check("theta_horizon_agreement", dth <= 0.02, dth, 0.02))
    lam = lambda_m(0.0064, P)
    out.append(barrier_check(t_short, Barrier(P, lam)))
    return out


SUITES = {
    "steady-family": steady_family,
    "envelopes": envelopes,
    "solver-properties": solver_properties,
    "convergence": convergence,
}


def run_suite(name: str) -> list[Check]:
    try:
        fn = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}") from None
    return fn()
