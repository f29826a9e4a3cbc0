"""Problem parameters, derived constants and the radial residual operators.

The parabolic problem is ``u_t = Δ_p u + |∇u|^q`` in the unit ball of R^N
with ``u = 0`` on the boundary.  Everything else in the package is driven by
the triple ``(p, q, N)`` and the three constants derived from it.

Reference for the operators (radial form, r in (0, 1))::

    f(r, mu, zeta)  = -(p-1)|mu|^(p-2) zeta - (N-1)/r |mu|^(p-2) mu - |mu|^q
    f0(r, mu, zeta) = -(p-1)|mu|^(p-2) zeta - (N-1)/r |mu|^(p-2) mu

The full N-dimensional operator ``F(s, X)`` is only ever evaluated through
its radial reduction ``f`` here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class ParameterError(ValueError):
    """Raised when (p, q, N) fall outside the admissible range."""


@dataclass(frozen=True)
class ProblemParams:
    p: float
    q: float
    dim: int = 2

    def __post_init__(self):
        p, q, dim = float(self.p), float(self.q), self.dim
        if not (math.isfinite(p) and math.isfinite(q)):
            raise ParameterError(f"non-finite exponents p={p}, q={q}")
        if p < 2:
            raise ParameterError(f"p >= 2 violated (p={p})")
        if not q > 0:
            raise ParameterError(f"0 < q violated (q={q})")
        if not q < p - 1:
            raise ParameterError(f"q < p - 1 violated (q={q}, p - 1={p - 1})")
        if int(dim) != dim or dim < 2:
            raise ParameterError(f"dimension N >= 2 required (N={dim})")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "dim", int(dim))

    @property
    def gap(self) -> float:
        """``p - 1 - q``, strictly positive."""
        return self.p - 1.0 - self.q


@dataclass(frozen=True)
class DerivedConstants:
    alpha: float
    beta: float
    c0: float

    @property
    def max_height(self) -> float:
        """``c0 / alpha``: the maximum of the ϑ = 0 steady state."""
        return self.c0 / self.alpha


def derive_constants(params: ProblemParams) -> DerivedConstants:
    """Return ``(alpha, beta, c0)`` for admissible parameters.

    ``c0 = ((p-1-q) / ((p-1) beta))^(1/(p-1-q))`` is the constant for which
    the closed-form steady states actually solve the stationary equation.
    """
    if not isinstance(params, ProblemParams):
        raise TypeError("expected ProblemParams")
    p, q, n = params.p, params.q, params.dim
    gap = params.gap
    alpha = (p - q) / gap
    beta = 1.0 + (n - 1) * gap / (p - 1.0)
    c0 = (gap / ((p - 1.0) * beta)) ** (1.0 / gap)
    return DerivedConstants(alpha=alpha, beta=beta, c0=c0)


def signed_power(z, e):
    """``sign(z) |z|^e`` without NaNs for negative bases."""
    z = np.asarray(z, dtype=float)
    out = np.sign(z) * np.abs(z) ** e
    return out if out.ndim else float(out)


def chi(z, params: ProblemParams):
    """Odd increasing map ``((p-1)/(p-1-q)) |z|^(p-2-q) z``.

    Written as ``k sign(z) |z|^(p-1-q)`` so that z = 0 is well defined even
    when ``p - 2 - q < 0``.
    """
    k = (params.p - 1.0) / params.gap
    return k * signed_power(z, params.gap)


def _check_radius(r):
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0) or np.any(r >= 1):
        raise ValueError("radius must lie in the open interval (0, 1); the origin is singular")
    return r


def p_laplace_residual_radial(r, mu, zeta, params: ProblemParams):
    """Radial p-Laplacian residual ``f0(r, mu, zeta)``."""
    r = _check_radius(r)
    mu = np.asarray(mu, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    # |mu|^(p-2) is 1 at mu = 0 when p = 2 (numpy gives 0**0 = 1) and 0 for p > 2
    w = np.abs(mu) ** (params.p - 2.0)
    out = -(params.p - 1.0) * w * zeta - (params.dim - 1) / r * w * mu
    return out if out.ndim else float(out)


def stationary_residual_radial(r, mu, zeta, params: ProblemParams):
    """Radial stationary residual ``f(r, mu, zeta) = f0 - |mu|^q``."""
    out = p_laplace_residual_radial(r, mu, zeta, params) - np.abs(np.asarray(mu, dtype=float)) ** params.q
    return out if np.ndim(out) else float(out)
