"""Flat key = value run configuration.

The file format is deliberately primitive: one ``key = value`` pair per
line, '#' starts a comment, blank lines are ignored.  Every control has a
default, so an empty file is a valid configuration.  Flags override file
values; the effective configuration is echoed next to every output so a
run can be reproduced from its artifacts alone.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

from .errors import ConfigError
from .model import ResonanceParams

__all__ = ["RunConfig", "parse_config", "load_config", "write_config"]

# physics fields a sweep axis may reference
SWEEPABLE = ("omega", "zeta", "lambda", "V", "hbar", "H0", "I0")


@dataclass(frozen=True)
class RunConfig:
    # resonance parameters
    omega: float = 1.0
    zeta: float = 0.5
    lam: float = 0.0
    V: float = 1.0
    N: int = 1
    M: int | None = None
    hbar: float = 1.0
    H0: float = 0.0
    I0: float = 0.0
    # wave packet
    mean_m: float = 0.0
    sigma_m: float = 2.0
    theta0: float = 0.0
    # numeric controls
    tol: float = 1e-10
    half_bandwidth: int = 32
    dt: float = 0.05
    steps: int = 700
    threshold: float = 0.4
    k_step: float = 1e-3
    m_range: int = 10
    workers: int = 1
    # sweep axes (param name, min, max, count, lin|log); count 0 disables
    sweep1_param: str = ""
    sweep1_min: float = 0.0
    sweep1_max: float = 0.0
    sweep1_count: int = 0
    sweep1_spacing: str = "lin"
    sweep2_param: str = ""
    sweep2_min: float = 0.0
    sweep2_max: float = 0.0
    sweep2_count: int = 0
    sweep2_spacing: str = "lin"

    def __post_init__(self):
        for name in ("tol", "dt", "sigma_m", "k_step", "hbar"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("half_bandwidth", "steps", "m_range", "workers", "N"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        if not (0.0 < self.threshold < 1.0):
            raise ConfigError(f"threshold must be in (0, 1), got {self.threshold}")
        if self.lam < 0:
            raise ConfigError(f"lambda must be >= 0, got {self.lam}")
        for ax in ("sweep1", "sweep2"):
            name = getattr(self, f"{ax}_param")
            count = getattr(self, f"{ax}_count")
            spacing = getattr(self, f"{ax}_spacing")
            if spacing not in ("lin", "log"):
                raise ConfigError(f"{ax}_spacing must be lin or log, got {spacing!r}")
            if name and name not in SWEEPABLE:
                raise ConfigError(
                    f"{ax}_param={name!r} is not a sweepable parameter "
                    f"(choose from {', '.join(SWEEPABLE)})"
                )
            if name and count < 1:
                raise ConfigError(f"{ax}_param is set but {ax}_count={count}")
            if spacing == "log" and name and (
                getattr(self, f"{ax}_min") <= 0 or getattr(self, f"{ax}_max") <= 0
            ):
                raise ConfigError(f"log spacing on {ax} needs positive bounds")

    def resonance_params(self, **overrides) -> ResonanceParams:
        values = dict(
            omega=self.omega, zeta=self.zeta, lam=self.lam, V=self.V,
            N=self.N, M=self.M, hbar=self.hbar, H0=self.H0, I0=self.I0,
        )
        values.update(overrides)
        try:
            return ResonanceParams(**values)
        except ValueError as err:
            raise ConfigError(str(err)) from err

    def with_(self, **kwargs) -> "RunConfig":
        return replace(self, **kwargs)


# config keys as written in files; 'lambda' is a keyword, hence the mapping
_KEY_TO_FIELD = {"lambda": "lam"}
_FIELD_TO_KEY = {v: k for k, v in _KEY_TO_FIELD.items()}


def _field_types():
    return {f.name: f.type for f in fields(RunConfig)}


def _convert(field_name: str, raw: str):
    raw = raw.strip()
    kind = _field_types()[field_name]
    try:
        if field_name == "M":
            return None if raw.lower() in ("none", "") else int(raw)
        if kind in ("int", int):
            return int(raw)
        if kind in ("float", float):
            return float(raw)
        return raw
    except ValueError as err:
        raise ConfigError(f"cannot parse {field_name} = {raw!r}: {err}") from err


def parse_config(text: str, base: RunConfig | None = None) -> RunConfig:
    """Parse flat key = value text into a RunConfig."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in body.split("=", 1))
        field_name = _KEY_TO_FIELD.get(key, key)
        if field_name not in _field_types():
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[field_name] = _convert(field_name, raw)
    base = base if base is not None else RunConfig()
    try:
        return replace(base, **values)
    except ConfigError:
        raise
    except Exception as err:  # replace re-runs __post_init__
        raise ConfigError(str(err)) from err


def load_config(path, base: RunConfig | None = None) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_config(fh.read(), base)
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err


def write_config(config: RunConfig, path, header_lines=()) -> None:
    """Echo the effective configuration; re-running it reproduces the run."""
    with open(path, "w", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        for f in fields(RunConfig):
            key = _FIELD_TO_KEY.get(f.name, f.name)
            value = getattr(config, f.name)
            if value is None:
                value = "none"
            fh.write(f"{key} = {value}\n")
