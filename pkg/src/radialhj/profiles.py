"""Catalog of initial profiles and the two-column profile file reader."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .params import ProblemParams
from .solver import RadialField, RadialGrid
from .steady import SteadyState

CATALOG = ("zero", "steady", "parabolic", "bump", "file")


def zero(r):
    return np.zeros_like(r)


def parabolic(r, amplitude=0.01):
    return amplitude * (1.0 - r * r)


def bump(r, center=0.5, width=0.25, height=0.01):
    """``height (1 - ((r - center)/width)^2)^2`` on the support, zero outside."""
    if width <= 0:
        raise ValueError("bump width must be positive")
    if center + width > 1.0 + 1e-15:
        raise ValueError("bump support must end inside the ball (center + width <= 1)")
    z = (r - center) / width
    return height * np.where(np.abs(z) < 1, (1 - z * z) ** 2, 0.0)


def read_profile(path) -> tuple[np.ndarray, np.ndarray]:
    """Read whitespace-separated ``r value`` pairs; ``#`` starts a comment."""
    data = np.loadtxt(path, comments="#", ndmin=2)
    if data.shape[1] != 2:
        raise ValueError(f"{path}: expected two columns, found {data.shape[1]}")
    r, v = data[:, 0], data[:, 1]
    if np.any(np.diff(r) <= 0):
        raise ValueError(f"{path}: radii must be strictly increasing")
    if r[0] > 0 or r[-1] < 1:
        raise ValueError(f"{path}: radii must cover [0, 1]")
    return r, v


def from_file(r, path):
    rr, vv = read_profile(path)
    return np.interp(r, rr, vv)


def build(name: str, grid: RadialGrid, params: ProblemParams | None = None, **kw) -> RadialField:
    """Sample a catalog profile on ``grid``; the value at r = 1 is pinned to 0."""
    r = grid.nodes
    if name == "zero":
        v = zero(r)
    elif name == "steady":
        if params is None:
            raise ValueError("steady profile needs problem parameters")
        v = kw.get("scale", 1.0) * SteadyState(params, kw.get("theta", 0.0)).value(r)
    elif name == "parabolic":
        v = parabolic(r, kw.get("amplitude", 0.01))
    elif name == "bump":
        v = bump(r, kw.get("center", 0.5), kw.get("width", 0.25), kw.get("height", 0.01))
    elif name == "file":
        if "path" not in kw or not kw["path"]:
            raise ValueError("file profile needs a path")
        v = from_file(r, Path(kw["path"]))
    else:
        raise ValueError(f"unknown profile {name!r}; choose from {', '.join(CATALOG)}")
    v = np.array(v, dtype=float)
    v[-1] = 0.0
    if np.any(v < 0):
        raise ValueError("initial profile must be non-negative")
    return RadialField(grid, v)
