import json

import numpy as np
import pytest

from radialhj import (Barrier, ProblemParams, RadialField, RadialGrid, SteadyState, check_flux_monotone,
                      check_scaled_derivative_monotone, convergence_report, derive_constants,
                      lambda_m, profile_diagnostics)
from radialhj.diagnostics import (Check, barrier_check, centered_derivative, comparison_check,
                                  first_integral_spread, solver_checks)
from helpers import bump, parabolic, run


def sampled(params, theta, n=256):
    g = RadialGrid(n)
    return RadialField(g, SteadyState(params, theta).value(g.nodes))


def test_zero_field(base):
    d = profile_diagnostics(RadialField(RadialGrid(32), np.zeros(33)), base)
    for arr in (d.derivative, d.scaled_derivative, d.flux):
        assert np.all(arr == 0)
    beta = derive_constants(base).beta
    np.testing.assert_allclose(d.first_integral, d.r ** beta / beta, rtol=1e-14)
    assert check_scaled_derivative_monotone(d) and check_flux_monotone(d)


def test_small_grid_rejected(base):
    with pytest.raises(ValueError):
        profile_diagnostics(RadialField(RadialGrid(8), np.zeros(9)), base)


def test_centered_derivative_exact_on_quadratic():
    r = np.linspace(0, 1, 33)
    d = centered_derivative(r ** 2, r[1])
    np.testing.assert_allclose(d[1:-1], 2 * r[1:-1], atol=1e-12)


def test_first_integral_of_w0_vanishes(base):
    dev = []
    for n in (64, 128, 256, 512):
        fi = profile_diagnostics(sampled(base, 0.0, n), base).first_integral
        dev.append(np.max(np.abs(fi[1:-1])) * n)
    assert max(dev) <= 1.5 * dev[0]


def test_first_integral_plateau_level(base):
    th = 0.5
    d = profile_diagnostics(sampled(base, th, 512), base)
    gamma = th ** 1.5 / 1.5
    assert gamma == pytest.approx(0.23570226, abs=1e-8)
    sel = (d.r > th + 0.05) & (d.r < 0.95)
    assert np.max(np.abs(d.first_integral[sel] - gamma)) <= 1e-3
    assert np.all(d.derivative[d.r < th - 0.01] == 0)


@pytest.mark.parametrize("pqn", [(2.0, 0.5, 2), (3.0, 1.0, 3)])
def test_first_integral_ladder_constant(pqn):
    P = ProblemParams(*pqn)
    beta = derive_constants(P).beta
    C = {}
    for n in (64, 128, 256, 512):
        worst = 0.0
        for th in np.linspace(0, 0.85, 10):
            d = profile_diagnostics(sampled(P, th, n), P)
            sel = (d.r > th + 0.05) & (d.r < 0.95)
            worst = max(worst, np.max(np.abs(d.first_integral[sel] - th ** beta / beta)))
        C[n] = worst * n
    assert max(C.values()) <= 1.5 * C[64]


@pytest.mark.parametrize("theta", [0.0, 0.2, 0.5, 0.8])
def test_steady_profiles_pass_monotone_checks(base, theta):
    d = profile_diagnostics(sampled(base, theta), base)
    assert check_scaled_derivative_monotone(d, 1e-6)
    assert check_flux_monotone(d, 1e-6)


def test_negative_control_scaled_derivative():
    P = ProblemParams(2.0, 0.5, 2)
    g = RadialGrid(128)
    d = profile_diagnostics(RadialField.from_function(g, lambda r: r * (1 - r)), P)
    c = check_scaled_derivative_monotone(d)
    assert not c and c.measured > 1e-6


def test_negative_control_flux(base):
    g = RadialGrid(128)
    d = profile_diagnostics(RadialField(g, g.nodes.copy()), base)
    assert not check_flux_monotone(d)


def test_first_integral_variance_decreases_late():
    P = ProblemParams(3.0, 1.0, 2)
    tr = run(P, 128, parabolic(0.1), 4.0, outputs=40)
    th = convergence_report(tr, P).theta_fit
    v = np.array([first_integral_spread(tr.field(k), P, th + 0.1, 0.9) for k in range(len(tr))])
    late = v[len(v) // 2:]
    assert np.all(np.diff(late) <= 1e-9 * late[0])


def test_report_zero_trajectory(base):
    rep = convergence_report(run(base, 32, lambda r: 0 * r, 1.0), base)
    assert rep.theta_fit == 1.0 and rep.converged and rep.M_inf_est == 0.0


def test_report_stationary_run(base):
    w = SteadyState(base, 0.3)
    tr = run(base, 256, w, 1.0)
    rep = convergence_report(tr, base)
    assert rep.theta_fit == pytest.approx(0.3, abs=0.02)
    assert np.all(rep.distance_series <= 5e-3 * w.max_value())
    assert rep.converged


def test_report_rejects_short_horizon(base):
    tr = run(base, 32, parabolic(), 0.1, outputs=5)
    with pytest.raises(ValueError, match="horizon"):
        convergence_report(tr, base)
    with pytest.raises(ValueError):
        convergence_report(run(base, 32, parabolic(), 0.1), base, tail_fraction=0.75)


def test_report_is_deterministic(base):
    a = convergence_report(run(base, 64, bump(), 0.5), base).to_dict()
    b = convergence_report(run(base, 64, bump(), 0.5), base).to_dict()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    assert a["schema"] == 1


def test_report_flags_overshoot(base):
    tr = run(base, 64, parabolic(0.2), 0.2)
    rep = convergence_report(tr, base)
    assert rep.theta_fit == 0.0 and not rep.converged
    assert any("c0/alpha" in note for note in rep.notes)


def test_solver_checks_pass_on_bump(base):
    checks = solver_checks(run(base, 128, bump(), 1.0), base)
    assert {c.name for c in checks} >= {"nonnegative", "bounded", "sup_norm_nonincreasing",
                                        "gradient_lower_bound", "gradient_envelope"}
    assert all(checks)


def test_barrier_check(base):
    tr = run(base, 128, parabolic(), 1.0)
    assert barrier_check(tr, Barrier(base, lambda_m(0.0064, base)))
    assert not barrier_check(tr, Barrier(base, 1.0))


def test_comparison_check(base):
    a, b = run(base, 64, parabolic(0.005), 0.5), run(base, 64, parabolic(0.01), 0.5)
    assert comparison_check(a, b) and not comparison_check(b, a)
    with pytest.raises(ValueError):
        comparison_check(a, run(base, 32, parabolic(), 0.5))


def test_check_serialises():
    d = Check("x", np.True_, np.float64(1.5), float("inf")).to_dict()
    assert d == {"name": "x", "passed": True, "measured": 1.5, "threshold": "inf"}
    json.dumps(d)
