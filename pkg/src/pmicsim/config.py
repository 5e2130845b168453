"""Flat ``key = value`` run configuration.

Example::

    # figure 2-7 set-up
    L = 1
    y0 = 0.245
    a = 0.01
    N = 50000
    t_list = 0, 2e-5, 4e-5
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

from .errors import ConfigError, PmicError
from .screen import BeamConfig
from .spectral import SlitAperture, WellConfig

REQUIRED = ("L", "y0", "a", "N")
FORMATS = ("csv", "pgm")


@dataclass(frozen=True)
class RunConfig:
    L: float
    y0: float
    a: float
    N: int
    hbar_over_m: float = 1.0
    t_measure: float = 0.0
    k_x: float = 10.0
    y_points: int = 4096
    t_points: int = 1024
    t_list: tuple[float, ...] = ()
    d_list: tuple[float, ...] = ()
    out_dir: str = "."
    format: tuple[str, ...] = FORMATS
    lines: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def well(self) -> WellConfig:
        return WellConfig(self.L, self.hbar_over_m, self.t_measure)

    @property
    def slit(self) -> SlitAperture:
        return SlitAperture(self.y0, self.a)

    @property
    def beam(self) -> BeamConfig:
        return BeamConfig(self.k_x, self.hbar_over_m)

    def to_text(self) -> str:
        out = []
        for f in fields(self):
            if f.name == "lines":
                continue
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = ", ".join(repr(x) if isinstance(x, float) else str(x) for x in v)
            elif isinstance(v, float):
                v = repr(v)
            out.append(f"{f.name} = {v}")
        return "\n".join(out) + "\n"


_KINDS = {f.name: f.type for f in fields(RunConfig) if f.name != "lines"}


def _number(key, raw, line, integer=False):
    try:
        if integer:
            v = float(raw)
            if not v.is_integer():
                raise ValueError
            return int(v)
        v = float(raw)
    except ValueError:
        kind = "an integer" if integer else "a number"
        raise ConfigError(f"{key} must be {kind}, got {raw!r}", key, line) from None
    if not math.isfinite(v):
        raise ConfigError(f"{key} must be finite, got {raw!r}", key, line)
    return v


def _convert(key, raw, line):
    kind = _KINDS[key]
    if kind == "int":
        return _number(key, raw, line, integer=True)
    if kind == "float":
        return _number(key, raw, line)
    if kind == "str":
        if not raw:
            raise ConfigError(f"{key} must not be empty", key, line)
        return raw
    items = [s.strip() for s in raw.split(",") if s.strip()]
    if key == "format":
        bad = [s for s in items if s not in FORMATS]
        if bad or not items:
            raise ConfigError(f"format must list items from {FORMATS}, got {raw!r}", key, line)
        return tuple(items)
    return tuple(_number(key, s, line) for s in items)


def parse_config(text: str) -> RunConfig:
    """Parse and validate; every error names the offending key (and line when known)."""
    values: dict = {}
    lines: dict = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw_line.strip()!r}", None, lineno)
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in _KINDS:
            raise ConfigError(f"unknown key {key!r}", key, lineno)
        if key in values:
            raise ConfigError(f"duplicate key {key!r} (first on line {lines[key]})", key, lineno)
        values[key] = _convert(key, raw, lineno)
        lines[key] = lineno
    for key in REQUIRED:
        if key not in values:
            raise ConfigError(f"missing required key {key!r}", key)
    cfg = RunConfig(**values, lines=lines)
    validate_config(cfg)
    return cfg


def _fail(cfg, key, message):
    raise ConfigError(message, key, cfg.lines.get(key))


def validate_config(cfg: RunConfig) -> None:
    for key in ("L", "hbar_over_m", "a", "k_x"):
        if not getattr(cfg, key) > 0:
            _fail(cfg, key, f"{key} must be positive, got {getattr(cfg, key)}")
    if cfg.N < 1:
        _fail(cfg, "N", f"N must be >= 1, got {cfg.N}")
    if cfg.N**2 > 2**53:
        _fail(cfg, "N", "N^2 must not exceed 2^53")
    if cfg.y_points < 2:
        _fail(cfg, "y_points", "y_points must be >= 2")
    if cfg.t_points < 1:
        _fail(cfg, "t_points", "t_points must be >= 1")
    try:
        cfg.slit.check_inside(cfg.well)
    except PmicError as exc:
        key = "y0" if abs(cfg.y0) >= 0.5 * cfg.L else "a"
        _fail(cfg, key, str(exc))
    for t in cfg.t_list:
        if t < cfg.t_measure:
            _fail(cfg, "t_list", f"time {t} precedes t_measure {cfg.t_measure}")
    for d in cfg.d_list:
        if d < 0:
            _fail(cfg, "d_list", f"distance {d} is negative")
