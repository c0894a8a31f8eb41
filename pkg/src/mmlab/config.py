"""Flat ``key = value`` experiment configuration with typed, per-suite schemas.

Lines starting with ``#`` are comments.  Lists are comma separated.  Unknown
keys and unparsable values raise :class:`~mmlab.errors.ConfigError`.
"""

from __future__ import annotations

import dataclasses
import typing
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError

__all__ = [
    "BoxTrendConfig",
    "CriteriaConfig",
    "DiracW2Config",
    "DissipationConfig",
    "LipCheckConfig",
    "MBLawConfig",
    "RegionMassConfig",
    "SUITE_CONFIGS",
    "SolidProkhorovConfig",
    "SphereW2Config",
    "load_config",
    "parse_config",
]


@dataclass(frozen=True)
class MBLawConfig:
    seed: int = 20240101
    dims: tuple[int, ...] = (50, 200, 1000)
    k: int = 1
    m: int = 5000
    trials: int = 3
    kind: str = "surface"
    profile: str = "round"
    scale: float = 1.0
    ratio: float = 0.5
    coupling: str = "transport"
    tol: float = 1e-4


@dataclass(frozen=True)
class SphereW2Config:
    seed: int = 20240102
    dims: tuple[int, ...] = (500,)
    k: int = 3
    m: int = 2000
    trials: int = 1
    profile: str = "geometric"
    scale: float = 0.5
    ratio: float = 0.5
    coupling: str = "independent"


@dataclass(frozen=True)
class SolidProkhorovConfig:
    seed: int = 20240103
    dims: tuple[int, ...] = (50, 200, 1000)
    m: int = 2000
    trials: int = 3
    profile: str = "geometric"
    scale: float = 0.5
    ratio: float = 0.5
    coupling: str = "transport"
    tol: float = 1e-4


@dataclass(frozen=True)
class RegionMassConfig:
    seed: int = 20240104
    dims: tuple[int, ...] = (50, 200, 1000, 2000)
    m: int = 10000
    N: int = 3
    eps: float = 0.1
    theta: float = 0.9
    a: float = 1.0
    head: tuple[float, ...] = (1.5, 1.2)


@dataclass(frozen=True)
class LipCheckConfig:
    seed: int = 20240105
    dims: tuple[int, ...] = (200,)
    points: int = 1000
    N: int = 3
    eps: float = 0.05
    theta: float = 0.9
    a: float = 1.0
    head: tuple[float, ...] = ()
    slack: float = 0.05


@dataclass(frozen=True)
class DissipationConfig:
    seed: int = 20240106
    n: int = 50
    steps: int = 5
    base: float = 2.0
    a: float = 1.0
    m: int = 2000
    kappa: float = 0.5
    kind: str = "surface"
    n_directions: int = 16


@dataclass(frozen=True)
class DiracW2Config:
    seed: int = 20240107
    dims: tuple[int, ...] = (50, 200, 1000)
    m: int = 5000
    kind: str = "surface"
    total: float = 1.0


@dataclass(frozen=True)
class BoxTrendConfig:
    seed: int = 20240108
    dims: tuple[int, ...] = (10, 20, 40, 80, 160)
    m: int = 300
    trim: float = 0.1
    kind: str = "surface"
    generator: str = "custom-limit"
    a: float = 1.0
    scale: float = 0.5
    ratio: float = 0.5
    limit: tuple[float, ...] = ()
    perturbation: str = "inverse-dim"


@dataclass(frozen=True)
class CriteriaConfig:
    seed: int = 0
    dims: tuple[int, ...] = (10, 20, 40, 80, 160)
    generator: str = "custom-limit"
    a: float = 1.0
    scale: float = 0.5
    ratio: float = 0.5
    limit: tuple[float, ...] = ()
    perturbation: str = "inverse-dim"


SUITE_CONFIGS = {
    "mb-law": MBLawConfig,
    "sphere-w2": SphereW2Config,
    "solid-prokhorov": SolidProkhorovConfig,
    "region-mass": RegionMassConfig,
    "lip-check": LipCheckConfig,
    "dissipation": DissipationConfig,
    "dirac-w2": DiracW2Config,
    "box-trend": BoxTrendConfig,
    "criteria": CriteriaConfig,
}

_CHOICES = {
    "kind": ("surface", "solid"),
    "profile": ("round", "geometric"),
    "coupling": ("transport", "independent"),
    "generator": ("round", "geometric", "custom-limit"),
    "perturbation": ("zero", "inverse-index", "inverse-dim"),
}


def _convert(key: str, raw: str, kind):
    origin = typing.get_origin(kind)
    try:
        if origin is tuple:
            (item, _) = typing.get_args(kind)
            parts = [p.strip() for p in raw.split(",") if p.strip()]
            return tuple(item(p) for p in parts)
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        return raw
    except ValueError as exc:
        raise ConfigError(f"bad value for {key!r}: {raw!r}") from exc


def _validate(cfg) -> None:
    for key, allowed in _CHOICES.items():
        if hasattr(cfg, key) and getattr(cfg, key) not in allowed:
            raise ConfigError(f"{key} must be one of {allowed}, got {getattr(cfg, key)!r}")
    for key in ("m", "trials", "k", "points", "n", "steps", "N"):
        if hasattr(cfg, key) and getattr(cfg, key) < 1:
            raise ConfigError(f"{key} must be >= 1")
    if hasattr(cfg, "dims") and (not cfg.dims or min(cfg.dims) < 2):
        raise ConfigError("dims must be a non-empty list of integers >= 2")
    if hasattr(cfg, "theta") and not 0 < cfg.theta < 1:
        raise ConfigError("theta must lie in (0, 1)")
    if hasattr(cfg, "kappa") and not 0 < cfg.kappa < 1:
        raise ConfigError("kappa must lie in (0, 1)")
    if hasattr(cfg, "head") and cfg.head and len(cfg.head) != cfg.N - 1:
        raise ConfigError("head must list N - 1 leading semiaxes (or be empty)")


def parse_config(suite: str, text: str = "", overrides: dict | None = None):
    """Build the typed config of ``suite`` from ``key = value`` text."""
    if suite not in SUITE_CONFIGS:
        raise ConfigError(f"unknown suite {suite!r}")
    cls = SUITE_CONFIGS[suite]
    hints = typing.get_type_hints(cls)
    known = {f.name for f in fields(cls)}
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"line {lineno}: unknown key {key!r} for suite {suite!r}")
        values[key] = _convert(key, raw, hints[key])
    values.update(overrides or {})
    cfg = cls(**values)
    _validate(cfg)
    return cfg


def load_config(suite: str, path=None, overrides: dict | None = None):
    text = ""
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    return parse_config(suite, text, overrides)


def config_to_dict(cfg) -> dict:
    out = {}
    for key, value in dataclasses.asdict(cfg).items():
        out[key] = list(value) if isinstance(value, tuple) else value
    return out
