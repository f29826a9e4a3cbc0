"""A priori envelopes for radial solutions.

* ``GradientEnvelope``: upper bound ``W(t)`` on the radial derivative, from
  ``W' + (N-1) a(W^2) W = 0`` with ``W(0) = 2 ||u0'||``.  For ``eps = 0`` the
  solution is explicit; for ``eps > 0`` it is integrated with classical RK4.
* ``Barrier``: scaled copy ``lambda^alpha w_0(|x - x0| / lambda)`` of the
  theta = 0 steady state, a stationary solution on the sub-ball that keeps
  ``||u(t)||`` away from zero.
* ``a_priori_A0``: the smallest bound constant allowed by the construction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import ProblemParams, derive_constants, stationary_residual_radial
from .steady import SteadyState


@dataclass(frozen=True)
class GradientEnvelope:
    params: ProblemParams
    W0: float
    epsilon: float = 0.0

    def __post_init__(self):
        if not self.W0 > 0:
            raise ValueError("W0 must be positive")
        if not 0.0 <= self.epsilon < 1.0:
            raise ValueError("epsilon must lie in [0, 1)")

    @property
    def char_time(self) -> float:
        # (p - 2) is floored at 1 so the step still resolves the decay rate
        # (N-1) W^(p-2) when p is close to 2
        p, n = self.params.p, self.params.dim
        return self.W0 ** (2.0 - p) / (max(p - 2.0, 1.0) * (n - 1))

    def _a(self, w):
        p, e = self.params.p, self.epsilon
        x = min(w * w, 1.0 / e)
        return (e * e + x) ** ((p - 2.0) / 2.0)

    def closed_form(self, t):
        """Limiting (eps = 0) envelope."""
        t = np.asarray(t, dtype=float)
        p, n = self.params.p, self.params.dim
        x = (n - 1) * t * self.W0 ** (p - 2.0)
        k = p - 2.0
        # W0 (1 + k x)^(-1/k), written so that k -> 0 recovers W0 exp(-x)
        decay = np.exp(-np.log1p(k * x) / k) if k > 0 else np.exp(-x)
        out = self.W0 * decay
        return out if out.ndim else float(out)

    def values(self, times) -> np.ndarray:
        """Envelope at each of ``times`` (any order, all >= 0)."""
        times = np.asarray(times, dtype=float)
        if np.any(times < 0):
            raise ValueError("time must be non-negative")
        if self.epsilon == 0.0:
            return np.asarray(self.closed_form(times), dtype=float)
        return self._rk4(times)

    def _rk4(self, times):
        n = self.params.dim
        f = lambda w: -(n - 1) * self._a(w) * w
        h_max = 1e-3 * self.char_time
        order = np.argsort(times, kind="stable")
        out = np.empty(times.shape)
        t, w = 0.0, float(self.W0)
        for idx in order:
            target = float(times.flat[idx])
            while t < target:
                h = min(h_max, target - t)
                k1 = f(w)
                k2 = f(w + 0.5 * h * k1)
                k3 = f(w + 0.5 * h * k2)
                k4 = f(w + h * k3)
                w += h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
                t += h
            out.flat[idx] = w
        return out


def envelope_value(env: GradientEnvelope, t: float) -> float:
    if t < 0:
        raise ValueError("time must be non-negative")
    return float(env.values(np.array([t]))[0])


@dataclass(frozen=True)
class Barrier:
    params: ProblemParams
    lam: float
    x0: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.x0 < 1.0:
            raise ValueError("centre offset must lie in [0, 1)")
        if not 0.0 < self.lam < 1.0 and not (self.lam == 1.0 and self.x0 == 0.0):
            raise ValueError("lambda must lie in (0, 1)")
        if self.lam > 1.0 - self.x0 + 1e-15:
            raise ValueError("ball B_lambda(x0) must stay inside the unit ball")

    @property
    def consts(self):
        return derive_constants(self.params)

    @property
    def scale(self) -> float:
        return self.lam ** self.consts.alpha

    @property
    def _w0(self) -> SteadyState:
        return SteadyState(self.params, 0.0)

    def sup(self) -> float:
        return self.scale * self.consts.max_height

    def value(self, s):
        s = np.asarray(s, dtype=float)
        if np.any(s < 0) or np.any(s > self.lam * (1 + 1e-15)):
            raise ValueError("distance from the centre must lie in [0, lambda]")
        out = self.scale * self._w0.value(np.minimum(s / self.lam, 1.0))
        return out if np.ndim(out) else float(out)

    def stationarity_residual(self, s):
        s = np.asarray(s, dtype=float)
        if np.any(s <= 0) or np.any(s >= self.lam):
            raise ValueError("residual only defined strictly inside (0, lambda)")
        w0, lam, alpha = self._w0, self.lam, self.consts.alpha
        d1 = lam ** (alpha - 1.0) * w0.derivative(s / lam)
        d2 = lam ** (alpha - 2.0) * w0.second_derivative(s / lam)
        return stationary_residual_radial(s, d1, d2, self.params)


def barrier_value(b: Barrier, s):
    return b.value(s)


def barrier_stationarity_residual(b: Barrier, s):
    return b.stationarity_residual(s)


def lambda_m(m: float, params: ProblemParams, x0: float = 0.0, radius: float | None = None) -> float:
    """Radius of the largest barrier lying below the level ``m``.

    ``min(1 - |x0|, (m alpha / c0)^((p-1-q)/(p-q)))``; pass ``radius`` to also
    keep the ball inside the region where ``u0 >= m``.
    """
    if not m > 0:
        raise ValueError("m must be positive")
    c = derive_constants(params)
    lam = min(1.0 - x0, (m * c.alpha / c.c0) ** (1.0 / c.alpha))
    if radius is not None:
        lam = min(lam, radius)
    return lam


def a_priori_A0(u0_sup: float, u0_lip: float, params: ProblemParams) -> float:
    """``2^(1/(p-1-q)) + 2 (1 + ||u0|| + ||u0'||)``."""
    if u0_sup < 0 or u0_lip < 0:
        raise ValueError("norms must be non-negative")
    return 2.0 ** (1.0 / params.gap) + 2.0 * (1.0 + u0_sup + u0_lip)


def a0_window_ok(A0: float, epsilon: float) -> bool:
    """Whether ``A0`` falls inside ``(sqrt(3) eps, eps^-1/2)``."""
    return math.sqrt(3.0) * epsilon < A0 < epsilon ** -0.5
