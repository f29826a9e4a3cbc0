"""Run and sweep configuration stored as strict INI files.

Sections: ``problem``, ``grid``, ``time``, ``initial``, ``tolerances``,
``output`` (and ``sweep`` for sweep files).  Unknown sections or keys are
errors so that archived configs keep meaning the same thing.
"""
from __future__ import annotations

import configparser
import io
import itertools
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .params import ProblemParams
from .profiles import CATALOG


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Tolerances:
    conv_tol: float = 5e-3
    tail_fraction: float = 0.25
    mono_rel: float = 1e-6
    env_rel: float = 0.05
    grad_rel: float = 0.05


@dataclass(frozen=True)
class RunConfig:
    p: float = 2.0
    q: float = 0.5
    dim: int = 2
    n: int = 512
    epsilon: float | None = None  # None: grid-tied
    t_end: float = 2.0
    outputs: int = 40
    dt: float = 1e-3
    scheme: str = "implicit"
    profile: str = "parabolic"
    theta: float = 0.0
    amplitude: float = 0.01
    center: float = 0.5
    width: float = 0.25
    height: float = 0.01
    scale: float = 1.0
    path: str = ""
    tolerances: Tolerances = field(default_factory=Tolerances)
    out_dir: str = "runs/default"

    def validate(self) -> "RunConfig":
        try:
            ProblemParams(self.p, self.q, self.dim)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.n < 16:
            raise ConfigError("grid needs n >= 16 cells")
        if not self.t_end > 0:
            raise ConfigError("t_end must be positive")
        if self.outputs < 1:
            raise ConfigError("outputs must be >= 1")
        if not self.dt > 0:
            raise ConfigError("dt must be positive")
        if self.scheme not in ("implicit", "explicit"):
            raise ConfigError(f"unknown scheme {self.scheme!r}")
        if self.epsilon is not None and not 0 < self.epsilon < 1:
            raise ConfigError("epsilon must lie in (0, 1)")
        if self.profile not in CATALOG:
            raise ConfigError(f"unknown profile {self.profile!r}")
        if self.profile == "file" and not Path(self.path).is_file():
            raise ConfigError(f"profile file not found: {self.path!r}")
        if not 0 <= self.theta <= 1:
            raise ConfigError("theta must lie in [0, 1]")
        if not 0 < self.tolerances.tail_fraction <= 0.5:
            raise ConfigError("tail_fraction must lie in (0, 0.5]")
        return self

    @property
    def params(self) -> ProblemParams:
        return ProblemParams(self.p, self.q, self.dim)

    def key(self) -> str:
        """Short identifier used for sweep run directories and row ordering."""
        return (f"p{self.p:g}_q{self.q:g}_N{self.dim}_n{self.n}"
                f"_{self.profile}_th{self.theta:g}_a{self.amplitude:g}")


_SECTIONS = {
    "problem": {"p": float, "q": float, "dim": int},
    "grid": {"n": int, "epsilon": "eps"},
    "time": {"t_end": float, "outputs": int, "dt": float, "scheme": str},
    "initial": {"profile": str, "theta": float, "amplitude": float, "center": float,
                "width": float, "height": float, "scale": float, "path": str},
    "tolerances": {f.name: float for f in fields(Tolerances)},
    "output": {"dir": str},
}


def _parser() -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    return cp


def _convert(kind, raw: str, where: str):
    try:
        if kind == "eps":
            return None if raw.strip().lower() in ("auto", "grid", "") else float(raw)
        return kind(raw.strip())
    except ValueError:
        raise ConfigError(f"{where}: cannot parse {raw!r}") from None


def _read_sections(cp: configparser.ConfigParser, extra=()) -> dict:
    values, tol = {}, {}
    for sec in cp.sections():
        if sec in extra:
            continue
        if sec not in _SECTIONS:
            raise ConfigError(f"unknown section [{sec}]")
        for key, raw in cp.items(sec):
            if key not in _SECTIONS[sec]:
                raise ConfigError(f"unknown key {key!r} in [{sec}]")
            val = _convert(_SECTIONS[sec][key], raw, f"[{sec}] {key}")
            if sec == "tolerances":
                tol[key] = val
            elif sec == "output":
                values["out_dir"] = val
            else:
                values[key] = val
    if tol:
        values["tolerances"] = Tolerances(**tol)
    return values


def parse_config(text: str) -> RunConfig:
    cp = _parser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    return RunConfig(**_read_sections(cp)).validate()


def load_config(path) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    return parse_config(path.read_text())


def serialize_config(cfg: RunConfig) -> str:
    d = asdict(cfg)
    lines = []
    for sec, keys in _SECTIONS.items():
        lines.append(f"[{sec}]")
        for key in keys:
            if sec == "tolerances":
                val = d["tolerances"][key]
            elif sec == "output":
                val = d["out_dir"]
            else:
                val = d[key]
            if key == "epsilon" and val is None:
                val = "auto"
            elif isinstance(val, float):
                val = repr(val)
            lines.append(f"{key} = {val}")
        lines.append("")
    return "\n".join(lines)


# -- sweeps -------------------------------------------------------------------

SWEEP_AXES = {"p": float, "q": float, "dim": int, "theta": float, "n": int, "amplitude": float}


@dataclass(frozen=True)
class SweepSpec:
    base: RunConfig
    axes: dict
    jobs: int = 1

    def expand(self) -> list[RunConfig]:
        names = sorted(self.axes)
        out = []
        for combo in itertools.product(*(self.axes[k] for k in names)):
            cfg = replace(self.base, **dict(zip(names, combo)))
            out.append(cfg)
        out = [replace(c, out_dir=str(Path(self.base.out_dir) / c.key())) for c in out]
        for c in out:
            c.validate()
        return sorted(out, key=RunConfig.key)


def parse_sweep(text: str, jobs: int = 1) -> SweepSpec:
    cp = _parser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    base = RunConfig(**_read_sections(cp, extra=("sweep",)))
    axes = {}
    if cp.has_section("sweep"):
        for key, raw in cp.items("sweep"):
            if key == "jobs":
                jobs = int(raw)
                continue
            if key not in SWEEP_AXES:
                raise ConfigError(f"cannot sweep over {key!r}; choose from {sorted(SWEEP_AXES)}")
            axes[key] = [_convert(SWEEP_AXES[key], x, f"[sweep] {key}") for x in raw.split(",") if x.strip()]
    if jobs < 1:
        raise ConfigError("jobs must be >= 1")
    return SweepSpec(base, axes, jobs)


def load_sweep(path, jobs: int = 1) -> SweepSpec:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"sweep file not found: {path}")
    return parse_sweep(path.read_text(), jobs)
