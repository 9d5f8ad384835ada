"""Run configuration: defaults, `key = value` config files, and command-line overrides.

Radii (r_min, r_max, r_star, delta, Delta and the window) are in units of
L = (4 pi rho0)^(-1/2); h is dimensionless.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

OUT_DIR_ENV = "TRAPINIT_OUT_DIR"


class ConfigError(ValueError):
    """Bad configuration value; the CLI turns it into a usage error."""


def parse_float(text: str) -> float:
    t = str(text).strip().lower()
    if t in ("inf", "+inf", "infinity"):
        return math.inf
    try:
        return float(t)
    except ValueError:
        raise ConfigError(f"not a number: {text!r}") from None


def parse_list(text) -> tuple:
    """Comma list, or logspace:lo:hi:n / linspace:lo:hi:n."""
    if isinstance(text, (list, tuple)):
        return tuple(float(v) for v in text)
    t = str(text).strip()
    for kind in ("logspace", "linspace"):
        if t.startswith(kind + ":"):
            parts = t.split(":")[1:]
            if len(parts) != 3:
                raise ConfigError(f"{kind} needs lo:hi:n, got {t!r}")
            lo, hi = parse_float(parts[0]), parse_float(parts[1])
            n = int(parts[2])
            if n < 1:
                raise ConfigError("range needs at least one point")
            if kind == "logspace":
                if lo <= 0 or hi <= 0:
                    raise ConfigError("logspace bounds must be positive")
                vals = np.geomspace(lo, hi, n)
            else:
                vals = np.linspace(lo, hi, n)
            return tuple(float(v) for v in vals)
    items = [s for s in t.split(",") if s.strip()]
    if not items:
        raise ConfigError("empty list")
    return tuple(parse_float(s) for s in items)


def parse_bool(text) -> bool:
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


@dataclass(frozen=True)
class RunConfig:
    k: float | None = None
    rho0: float = 1.0
    r_min: float = 1e-6
    r_max: float = 1e3
    tolerance: float = 1e-10
    points_per_decade: int = 400
    r_star: float = 2.0
    delta: float | None = None
    h: float | None = None
    Delta: float | None = None
    at_threshold: bool = False
    k_values: tuple = ()
    r_star_values: tuple = ()
    delta_values: tuple = ()
    h_values: tuple = ()
    mode: str = "grid"
    window_lo: float = 1e2
    window_hi: float = 1e3
    out_dir: str | None = None
    plot: bool = False
    log_x: bool = True
    workers: int = 1

    @property
    def Delta_value(self) -> float:
        return 0.5 * self.r_star if self.Delta is None else self.Delta

    @property
    def delta_value(self) -> float:
        return self.Delta_value / 10.0 if self.delta is None else self.delta

    def output_dir(self) -> Path:
        path = Path(self.out_dir or os.environ.get(OUT_DIR_ENV) or ".")
        path.mkdir(parents=True, exist_ok=True)
        return path

    def validate(self, need_k: bool = True) -> "RunConfig":
        if need_k and self.k is None:
            raise ConfigError("--k is required")
        if self.k is not None and not (0.0 < self.k < 1.0):
            raise ConfigError("k must lie in (0, 1)")
        for k in self.k_values:
            if not (0.0 < k < 1.0):
                raise ConfigError("every k value must lie in (0, 1)")
        if not (self.rho0 > 0.0 and math.isfinite(self.rho0)):
            raise ConfigError("rho0 must be positive")
        if not (0.0 < self.r_min < self.r_max):
            raise ConfigError("need 0 < r-min < r-max")
        if self.r_min > 1e-2:
            raise ConfigError("r-min must not exceed 1e-2 L")
        if not (0.0 < self.tolerance < 1e-3):
            raise ConfigError("tolerance must lie in (0, 1e-3)")
        if self.points_per_decade < 10:
            raise ConfigError("points-per-decade must be at least 10")
        if not (self.r_star > 0.0):
            raise ConfigError("r-star must be positive")
        if not (0.0 < self.Delta_value < self.r_star):
            raise ConfigError("need 0 < Delta < r-star")
        if not (0.0 < self.delta_value < self.Delta_value) or self.delta_value > 0.5 * self.r_star:
            raise ConfigError("need 0 < delta < Delta and delta <= r-star/2")
        if self.h is not None and not (self.h > 0.0):
            raise ConfigError("h must be positive")
        if self.mode not in ("grid", "bisect"):
            raise ConfigError("mode must be 'grid' or 'bisect'")
        if not (0.0 < self.window_lo and self.window_hi / self.window_lo >= 10.0):
            raise ConfigError("asymptotic window must span at least one decade")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        return self


_CONVERTERS = {
    "k": parse_float, "rho0": parse_float, "r_min": parse_float, "r_max": parse_float,
    "tolerance": parse_float, "points_per_decade": int, "r_star": parse_float,
    "delta": parse_float, "h": parse_float, "Delta": parse_float,
    "at_threshold": parse_bool, "k_values": parse_list, "r_star_values": parse_list,
    "delta_values": parse_list, "h_values": parse_list, "mode": str,
    "window_lo": parse_float, "window_hi": parse_float, "out_dir": str,
    "plot": parse_bool, "log_x": parse_bool, "workers": int,
}


def _field_name(key: str) -> str:
    name = key.strip().replace("-", "_")
    known = {f.name for f in fields(RunConfig)}
    if name in known:
        return name
    raise ConfigError(f"unknown configuration key {key!r}")


def coerce(updates: dict) -> dict:
    out = {}
    for key, value in updates.items():
        name = _field_name(key)
        try:
            out[name] = _CONVERTERS[name](value) if isinstance(value, str) else value
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key}: {exc}") from None
    return out


def read_config_file(path) -> dict:
    """Parse `key = value` lines; '#' starts a comment."""
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return coerce(values)


def build_config(file_path=None, overrides: dict | None = None) -> RunConfig:
    cfg = RunConfig()
    if file_path:
        cfg = replace(cfg, **read_config_file(file_path))
    if overrides:
        cfg = replace(cfg, **coerce(overrides))
    return cfg


def config_dict(cfg: RunConfig) -> dict:
    return {f.name: getattr(cfg, f.name) for f in fields(cfg) if f.name != "out_dir"}
