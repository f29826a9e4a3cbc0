"""Method-of-lines solver for the regularised radial problem.

The regularised equation is::

    u_t = r^(1-N) (r^(N-1) a(|u_r|^2) u_r)_r + b(|u_r|^2),   u(1, t) = 0,  u_r(0, t) = 0

with ``a(xi) = (eps^2 + xi)^((p-2)/2)`` and ``b(xi) = (eps^2 + xi)^(q/2) - eps^q``
on ``[0, 1/eps]``, frozen beyond ``xi = 1/eps``.

Space is discretised by conservative flux differencing on half nodes and an
upwind (Rouy-Tourin type) gradient for the source, which makes the semi-discrete
operator monotone.  Two time integrators are available:

``implicit`` (default)
    backward Euler, solved with Newton iterations on the tridiagonal Jacobian.
    Each iteration is an M-matrix solve, so once converged the step preserves
    the maximum principle and the ordering of solutions for any ``dt``.
``explicit``
    forward Euler under the monotonicity bound ``dt * max|diag J| <= cfl``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from .params import ProblemParams

log = logging.getLogger(__name__)

EPS_FLOOR = 1e-150
# rounding-level steps (in units of spacing(max|u|)) that the source ignores
DEAD_ZONE_ULPS = 256


class BlowUpError(RuntimeError):
    """Solution left the a priori bounded range; indicates a scheme failure."""


class StabilityError(ValueError):
    """Explicit step requested with a time increment beyond the stability bound."""


@dataclass(frozen=True)
class RegularizedCoefficients:
    epsilon: float
    params: ProblemParams

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")

    @property
    def xi_max(self) -> float:
        return 1.0 / self.epsilon

    def _clamp(self, xi):
        xi = np.asarray(xi, dtype=float)
        if np.any(xi < 0):
            raise ValueError("squared gradient must be non-negative")
        return np.minimum(xi, self.xi_max)

    def a(self, xi):
        """Diffusion coefficient ``a_eps(xi)``."""
        out = (self.epsilon ** 2 + self._clamp(xi)) ** ((self.params.p - 2.0) / 2.0)
        return out if out.ndim else float(out)

    def b(self, xi):
        """Source ``b_eps(xi)``, zero at ``xi = 0``."""
        e, q = self.epsilon, self.params.q
        out = (e * e + self._clamp(xi)) ** (q / 2.0) - e ** q
        return out if out.ndim else float(out)

    def flux_slope(self, g):
        """``d/dg [a(g^2) g]`` (zero-order extension beyond the clamp)."""
        g = np.asarray(g, dtype=float)
        x = g * g
        e2, p = self.epsilon ** 2, self.params.p
        inside = x < self.xi_max
        da = np.where(inside, (p - 2.0) / 2.0 * (e2 + np.minimum(x, self.xi_max)) ** ((p - 4.0) / 2.0), 0.0)
        return self.a(x) + 2.0 * x * da

    def source_slope(self, g):
        """``d/dg b(g^2)`` for g >= 0."""
        g = np.asarray(g, dtype=float)
        x = g * g
        q, e2 = self.params.q, self.epsilon ** 2
        return np.where(x < self.xi_max, q * g * (e2 + np.minimum(x, self.xi_max)) ** (q / 2.0 - 1.0), 0.0)


def grid_epsilon(n: int, q: float) -> float:
    """Grid-tied regularisation ``eps = h^(2/q)`` so that the source defect
    ``eps^q`` is ``O(h^2)``; floored to stay representable."""
    h = 1.0 / n
    return max(h ** (2.0 / q), EPS_FLOOR)


@dataclass(frozen=True)
class RadialGrid:
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError("grid needs at least 2 cells")

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.n + 1) * self.h

    @property
    def half_nodes(self) -> np.ndarray:
        return (np.arange(self.n) + 0.5) * self.h


@dataclass(frozen=True)
class RadialField:
    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.grid.n + 1,):
            raise ValueError(f"expected {self.grid.n + 1} values, got shape {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, grid: RadialGrid, fn) -> "RadialField":
        return cls(grid, np.asarray(fn(grid.nodes), dtype=float))

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def forward_differences(self) -> np.ndarray:
        return np.diff(self.values) / self.grid.h

    @property
    def dirichlet_ok(self) -> bool:
        return self.values[-1] == 0.0


@dataclass
class Trajectory:
    grid: RadialGrid
    times: np.ndarray
    states: np.ndarray  # shape (len(times), n + 1)
    epsilon: float
    stats: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.asarray(self.states, dtype=float)
        if self.states.shape != (len(self.times), self.grid.n + 1):
            raise ValueError("states do not match times and grid")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    def __len__(self):
        return len(self.times)

    def field(self, k: int) -> RadialField:
        return RadialField(self.grid, self.states[k])

    @property
    def sup_norms(self) -> np.ndarray:
        return np.max(np.abs(self.states), axis=1)

    @property
    def grad_min(self) -> np.ndarray:
        return np.min(np.diff(self.states, axis=1), axis=1) / self.grid.h

    @property
    def grad_max(self) -> np.ndarray:
        return np.max(np.diff(self.states, axis=1), axis=1) / self.grid.h


# -- semi-discrete operator ------------------------------------------------

def dead_zone(u) -> float:
    """Height below which a nodal difference counts as flat for the source."""
    return DEAD_ZONE_ULPS * float(np.spacing(max(float(np.max(np.abs(u))), 1e-300)))


def _operator(u, grid: RadialGrid, coeffs: RegularizedCoefficients, source_jacobian="newton",
              tau: float | None = None):
    """Return ``F(u)`` and the three diagonals of an approximate Jacobian.

    ``source_jacobian`` selects the linearisation of the upwind source:
    ``"newton"`` uses the exact slope, ``"secant"`` uses ``b(g^2)/g``.  Both give
    non-negative off-diagonals.  Upwind differences are shrunk by ``tau``
    (default :func:`dead_zone` of ``u``) before entering the source.
    """
    if tau is None:
        tau = dead_zone(u)
    n, h, dim = grid.n, grid.h, coeffs.params.dim
    r = grid.nodes
    rh = grid.half_nodes ** (dim - 1)
    g = np.diff(u) / h
    a = coeffs.a(g * g)
    flux = rh * a * g
    dflux = rh * coeffs.flux_slope(g)

    F = np.zeros(n + 1)
    lo = np.zeros(n + 1)
    di = np.zeros(n + 1)
    up = np.zeros(n + 1)

    i = np.arange(1, n)
    w = 1.0 / (h * r[i] ** (dim - 1))
    F[i] = (flux[i] - flux[i - 1]) * w
    up[i] = dflux[i] * w / h
    lo[i] = dflux[i - 1] * w / h
    di[i] = -(up[i] + lo[i])

    # origin: ghost u_{-1} = u_1, N-fold multiplicity of the Laplacian
    F[0] = 2.0 * dim * a[0] * g[0] / h
    c = 2.0 * dim * float(coeffs.flux_slope(g[:1])[0]) / h ** 2
    di[0], up[0] = -c, c

    back = np.maximum((u[i - 1] - u[i] - tau) / h, 0.0)
    fwd = np.maximum((u[i + 1] - u[i] - tau) / h, 0.0)
    use_back = back >= fwd
    gu = np.where(use_back, back, fwd)
    src = coeffs.b(gu * gu)
    F[i] += src
    if source_jacobian == "newton":
        slope = coeffs.source_slope(gu) / h
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            slope = np.where(gu > 0, src / (gu * h), 0.0)
    lo[i] += np.where(use_back, slope, 0.0)
    up[i] += np.where(use_back, 0.0, slope)
    di[i] -= slope
    return F, lo, di, up


def rhs(field: RadialField, coeffs: RegularizedCoefficients) -> np.ndarray:
    """Semi-discrete time derivative at every node (zero at r = 1)."""
    F, *_ = _operator(field.values, field.grid, coeffs)
    F[-1] = 0.0
    return F


def explicit_dt_limit(field: RadialField, coeffs: RegularizedCoefficients) -> float:
    """Largest ``dt`` for which the forward Euler update stays monotone.

    Uses the secant slope of the source, i.e. the actual weight with which
    neighbouring values enter the update.
    """
    _, _, di, _ = _operator(field.values, field.grid, coeffs, source_jacobian="secant")
    # diffusion part of the diagonal is bounded by 2N max a / h^2 at the origin row
    m = float(np.max(-di[:-1]))
    return np.inf if m <= 0 else 1.0 / m


def _banded(lo, di, up, dt):
    n1 = len(di)
    ab = np.zeros((3, n1))
    ab[0, 1:] = -dt * up[:-1]
    ab[1] = 1.0 - dt * di
    ab[2, :-1] = -dt * lo[1:]
    # Dirichlet row at r = 1
    ab[1, -1] = 1.0
    ab[2, -2] = 0.0
    ab[0, -1] = 0.0
    return ab


@dataclass
class StepInfo:
    iterations: int = 0
    converged: bool = True
    residual: float = 0.0  # sup norm of the final residual, relative to max|u|


def _implicit_values(u, dt, grid, coeffs, max_iter, tol, info: StepInfo):
    tau = dead_zone(u)

    def residual(v):
        F, *_ = _operator(v, grid, coeffs, source_jacobian="secant", tau=tau)
        R = v - u - dt * F
        R[-1] = v[-1]
        return R

    scale = max(float(np.max(np.abs(u))), 1e-300)
    v = u.copy()
    R = residual(v)
    nr = float(np.max(np.abs(R)))
    best_v, best_r = v, nr
    for k in range(max_iter):
        if nr <= 1e-15 * scale:
            info.iterations += k
            info.residual = nr / scale
            return v
        # exact slope first; fall back to the secant slope, which contracts
        # even where the source is non-Lipschitz
        for mode in ("newton", "secant"):
            _, lo, di, up = _operator(v, grid, coeffs, source_jacobian=mode, tau=tau)
            cand = v - solve_banded((1, 1), _banded(lo, di, up, dt), R)
            Rc = residual(cand)
            nc = float(np.max(np.abs(Rc)))
            if nc <= 0.9 * nr:
                break
        dv = float(np.max(np.abs(cand - v)))
        v, R, nr = cand, Rc, nc
        if nr < best_r:
            best_v, best_r = v, nr
        if dv <= tol * scale:
            info.iterations += k + 1
            info.residual = nr / scale
            return v
    # the implicit map is diagonally dominant with unit excess, so the error
    # of the returned iterate is bounded by its residual
    info.iterations += max_iter
    info.converged = False
    info.residual = best_r / scale
    return best_v


def step(state: RadialField, dt: float, coeffs: RegularizedCoefficients, *,
         scheme: str = "implicit", cfl: float = 0.9, max_iter: int = 40,
         tol: float = 1e-12, info: StepInfo | None = None) -> RadialField:
    """Advance one time step of size ``dt``."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    if not state.dirichlet_ok:
        raise ValueError("state violates the Dirichlet condition u(1) = 0")
    info = info if info is not None else StepInfo()
    u = np.array(state.values)
    if scheme == "explicit":
        limit = cfl * explicit_dt_limit(state, coeffs)
        if dt > limit * (1 + 1e-12):
            raise StabilityError(f"dt={dt:g} exceeds explicit limit {limit:g}")
        v = u + dt * rhs(state, coeffs)
        info.iterations += 1
    elif scheme == "implicit":
        v = _implicit_values(u, dt, state.grid, coeffs, max_iter, tol, info)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    v[-1] = 0.0
    return RadialField(state.grid, v)


def solve(u0: RadialField, coeffs: RegularizedCoefficients, t_end: float, output_times=None, *,
          dt: float = 1e-3, scheme: str = "implicit", cfl: float = 0.9,
          max_iter: int = 40, tol: float = 1e-12) -> Trajectory:
    """Integrate from ``t = 0`` to ``t_end`` and sample at ``output_times``.

    The initial state is always stored as the first sample (t = 0).  For the
    explicit scheme ``dt`` is an upper bound; the actual step is also capped
    by the monotonicity limit of the current state.
    """
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    if np.any(u0.values < 0):
        raise ValueError("initial data must be non-negative")
    if not u0.dirichlet_ok:
        raise ValueError("initial data must vanish at r = 1")
    if output_times is None:
        output_times = np.linspace(0.0, t_end, 41)[1:]
    out_t = np.unique(np.asarray(output_times, dtype=float))
    out_t = out_t[out_t > 0]
    if len(out_t) == 0 or out_t[-1] > t_end * (1 + 1e-12) or out_t[0] <= 0:
        raise ValueError("output times must lie in (0, t_end]")

    guard = 10.0 * u0.sup_norm + 1.0
    info = StepInfo()
    times, states = [0.0], [np.array(u0.values)]
    cur, t, nsteps, failed, worst = u0, 0.0, 0, 0, 0.0
    for target in out_t:
        while t < target * (1 - 1e-14):
            remaining = target - t
            h_step = remaining / max(1, int(np.ceil(remaining / dt - 1e-9)))
            if scheme == "explicit":
                h_step = min(h_step, cfl * explicit_dt_limit(cur, coeffs))
            sinfo = StepInfo()
            cur = step(cur, h_step, coeffs, scheme=scheme, cfl=cfl, max_iter=max_iter, tol=tol, info=sinfo)
            info.iterations += sinfo.iterations
            failed += not sinfo.converged
            worst = max(worst, sinfo.residual)
            t += h_step
            nsteps += 1
            if not np.all(np.isfinite(cur.values)) or cur.sup_norm > guard:
                raise BlowUpError(f"solution exceeded {guard:g} at t={t:g}; the scheme is unstable")
        t = float(target)
        times.append(t)
        states.append(np.array(cur.values))
    if failed:
        log.warning("%d of %d implicit steps hit the iteration cap (worst relative residual %.1e)",
                    failed, nsteps, worst)
    stats = {"steps": nsteps, "iterations": info.iterations, "unconverged_steps": failed,
             "max_residual": worst,
             "scheme": scheme, "dt": dt}
    return Trajectory(u0.grid, np.array(times), np.array(states), coeffs.epsilon, stats)
