"""Radially symmetric, non-increasing steady states.

Every such steady state is a member of a one-parameter family indexed by the
plateau radius ``theta`` in [0, 1]::

    w(r) = c0 * integral_{max(r, theta)}^{1} (rho - theta^beta rho^(1-beta))^(1/(p-1-q)) d rho

``w`` is flat on [0, theta] and strictly decreasing on (theta, 1].  Its
maximum decreases strictly from ``c0/alpha`` (theta = 0) to 0 (theta = 1), so
the maximum identifies the member uniquely.
"""
from __future__ import annotations

import math
import warnings

import numpy as np
from scipy import integrate

from .params import DerivedConstants, ProblemParams, chi, derive_constants

# panels ϑ + (1-ϑ) 2^-k, k = 0..GRADING_LEVELS, cluster toward the root of the integrand
GRADING_LEVELS = 24
THETA_TOL = 1e-10
MAX_BISECTIONS = 60


class SteadyState:
    """Member ``w_theta`` of the steady-state family for fixed ``(p, q, N)``."""

    def __init__(self, params: ProblemParams, theta: float, quad_tol: float = 1e-12):
        theta = float(theta)
        if not 0.0 <= theta <= 1.0:
            raise ValueError(f"theta must lie in [0, 1], got {theta}")
        if quad_tol <= 0:
            raise ValueError("quad_tol must be positive")
        self.params = params
        self.consts: DerivedConstants = derive_constants(params)
        self.theta = theta
        self.quad_tol = float(quad_tol)
        self._exponent = 1.0 / params.gap
        self._max = None

    def __repr__(self):
        p = self.params
        return f"SteadyState(p={p.p}, q={p.q}, N={p.dim}, theta={self.theta})"

    # -- pointwise pieces -------------------------------------------------
    def _base(self, rho):
        """``rho - theta^beta rho^(1-beta)``, clipped at 0, for rho >= theta."""
        rho = np.asarray(rho, dtype=float)
        if self.theta == 0.0:
            return rho
        beta = self.consts.beta
        with np.errstate(divide="ignore"):
            # rho (1 - (theta/rho)^beta) without cancellation near rho = theta
            s = -rho * np.expm1(beta * np.log(self.theta / rho))
        return np.maximum(s, 0.0)

    def _integrand(self, rho):
        return self._base(rho) ** self._exponent

    def _breakpoints(self, lo: float) -> list[float]:
        th = self.theta
        pts = [th + (1.0 - th) * 2.0 ** (-k) for k in range(GRADING_LEVELS + 1)]
        pts = sorted({x for x in pts if lo < x < 1.0} | {lo, 1.0})
        return pts

    def _segment(self, a: float, b: float, tol: float) -> float:
        if b <= a:
            return 0.0
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, _ = integrate.quad(self._integrand, a, b, epsabs=tol, epsrel=1e-14, limit=200)
        return val

    def _integral_from(self, lo: float) -> float:
        pts = self._breakpoints(lo)
        tol = 0.1 * self.quad_tol / len(pts)
        return sum(self._segment(a, b, tol) for a, b in zip(pts[:-1], pts[1:]))

    # -- public API -------------------------------------------------------
    def value(self, r):
        """Evaluate ``w_theta`` at radii in [0, 1] (scalar or array)."""
        r_arr = np.asarray(r, dtype=float)
        if np.any(r_arr < 0) or np.any(r_arr > 1):
            raise ValueError("radius must lie in [0, 1]")
        if self.theta == 1.0:
            out = np.zeros_like(r_arr)
            return out if out.ndim else 0.0
        if r_arr.ndim == 0:
            lo = max(float(r_arr), self.theta)
            return 0.0 if lo >= 1.0 else self.consts.c0 * self._integral_from(lo)
        return self._value_many(r_arr)

    def _value_many(self, r: np.ndarray) -> np.ndarray:
        # integrate between consecutive sorted radii once, then accumulate from r = 1
        lo = np.maximum(r, self.theta)
        knots = np.unique(np.concatenate([lo.ravel(), self._breakpoints(self.theta), [1.0]]))
        knots = knots[knots >= self.theta]
        tol = 0.1 * self.quad_tol / len(knots)
        pieces = np.array([self._segment(a, b, tol) for a, b in zip(knots[:-1], knots[1:])])
        tail = np.concatenate([np.cumsum(pieces[::-1])[::-1], [0.0]])
        idx = np.searchsorted(knots, lo.ravel())
        return (self.consts.c0 * tail[idx]).reshape(r.shape)

    def derivative(self, r):
        """``d w / d r``: 0 on [0, theta], ``-c0 base(r)^(1/(p-1-q))`` beyond."""
        r_arr = np.asarray(r, dtype=float)
        if np.any(r_arr < 0) or np.any(r_arr > 1):
            raise ValueError("radius must lie in [0, 1]")
        out = np.zeros_like(r_arr)
        m = r_arr > self.theta
        out[m] = -self.consts.c0 * self._integrand(r_arr[m])
        return out if out.ndim else float(out)

    def second_derivative(self, r):
        """``d^2 w / d r^2`` on (theta, 1]; the plateau edge itself is excluded."""
        r_arr = np.asarray(r, dtype=float)
        if np.any(r_arr <= self.theta) or np.any(r_arr > 1):
            raise ValueError("second derivative is only defined on (theta, 1]")
        beta, m = self.consts.beta, self._exponent
        s = self._base(r_arr)
        ds = 1.0 + (beta - 1.0) * (self.theta / r_arr) ** beta
        out = -self.consts.c0 * m * s ** (m - 1.0) * ds
        return out if out.ndim else float(out)

    def max_value(self) -> float:
        """``w_theta(0)``, the sup norm of the steady state."""
        if self._max is None:
            self._max = float(self.value(0.0))
        return self._max

    def first_integral_residual(self, r):
        """``r^(beta-1) chi(w'(r)) + r^beta/beta - theta^beta/beta`` on (theta, 1]."""
        r_arr = np.asarray(r, dtype=float)
        if np.any(r_arr <= self.theta) or np.any(r_arr > 1):
            raise ValueError("the first integral is constant only on (theta, 1)")
        beta = self.consts.beta
        out = (r_arr ** (beta - 1.0) * chi(self.derivative(r_arr), self.params)
               + (r_arr ** beta - self.theta ** beta) / beta)
        return out if np.ndim(out) else float(out)


def max_value(params: ProblemParams, theta: float, quad_tol: float = 1e-12) -> float:
    return SteadyState(params, theta, quad_tol).max_value()


def theta_from_max(M: float, params: ProblemParams, tol: float = THETA_TOL,
                   quad_tol: float = 1e-12) -> float:
    """Invert the strictly decreasing map ``theta -> max w_theta`` by bisection.

    Returns ``theta`` to within ``tol``; ``M = 0`` gives 1 and ``M = c0/alpha``
    gives 0.
    """
    top = derive_constants(params).max_height
    M = float(M)
    if not math.isfinite(M) or M < 0 or M > top + quad_tol:
        raise ValueError(f"M={M!r} outside [0, c0/alpha] = [0, {top!r}]; no steady state attains it")
    if M == 0.0:
        return 1.0
    if M >= top:
        return 0.0
    lo, hi = 0.0, 1.0
    for _ in range(MAX_BISECTIONS):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if max_value(params, mid, quad_tol) > M:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
