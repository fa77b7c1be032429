"""Experiment configuration: dataclasses with an INI-file loader.

A config file has one section per experiment; every key is optional and
falls back to the dataclass default.  ``defaults.ini`` next to this module
lists every key with a comment.
"""
from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any


class ConfigError(ValueError):
    pass


def _floats(*xs):
    return field(default_factory=lambda: [float(x) for x in xs])


@dataclass
class KernelConfig:
    delta: float = 1.0
    p: int = 4


@dataclass
class LimitConfig:
    cases: list = field(default_factory=lambda: ["sphere:2:cos", "hyperbolic:2:gauss", "euclidean:1:square"])
    epsilons: list = _floats(0.2, 0.1, 0.05)
    window: list = _floats(0.5, 1.5)
    nodes_per_support: int = 32
    angular_order: int = 32
    order_min: float = 1.9
    order_max: float = 2.1
    floor_tol: float = 1e-8
    pointwise_tol: float = 1e-3
    alpha: float = 0.9


@dataclass
class SpectrumConfig:
    circle_n: int = 512
    circle_delta: float = 1.0
    k_max: int = 10
    circle_tol: float = 1e-6
    lambda0_tol: float = 1e-10
    ortho_tol: float = 1e-8
    sphere_n: int = 256
    sphere_delta: float = 0.5
    l_max: int = 8
    sphere_tol: float = 1e-4


@dataclass
class DecayConfig:
    manifold: str = "circle"
    n: int = 512
    delta: float = 1.0
    t_bound: list = _floats(1, 5, 10)
    t_fit: list = _floats(10, 15, 20, 25, 30, 35, 40)
    t_linf: list = _floats(1, 2, 3, 4, 5, 6, 7, 8, 9, 10)
    bound_slack: float = 1e-8
    rate_tol: float = 0.02
    pairs: int = 100
    pair_n: int = 512
    t_pairs: list = _floats(1, 5)
    c0_list: list = _floats(1, 0.5, 2)
    order_tol: float = 1e-10


@dataclass
class HeatConfig:
    dims: list = field(default_factory=lambda: [2, 3])
    b: float = 8.0
    rho_max: float = 10.0
    rho_points: int = 201
    t_large: list = _floats(10, 160)
    t_small: list = _floats(1e-3, 1e-2)
    t_points: int = 9
    slope_large: float = -1.5
    slope_large_tol: float = 0.05
    slope_small_tol: float = 0.1


@dataclass
class MainTheoremConfig:
    dim: int = 3
    delta: float = 3.0
    bump_width: float = 1.0
    t_list: list = _floats(5, 10, 20, 40)
    ratio: float = 0.25
    rho_max: float = 30.0
    rho_points: int = 601
    lambda_max: float = 20.0
    dlambda: float = 0.02
    cross_t: float = 1.0
    cross_r_max: float = 12.0
    cross_tol: float = 1e-3
    panel: float = 0.25
    panel_order: int = 8


@dataclass
class ConservationConfig:
    dim: int = 3
    bump_width: float = 1.0
    t_list: list = _floats(0, 2, 4, 6, 8, 10)
    r_max: float = 30.0
    panel: float = 0.25
    panel_order: int = 8
    dt: float = 0.05
    fourier_tol: float = 1e-6
    quad_tol: float = 1e-3
    mass_tol: float = 1e-3


@dataclass
class TransformConfig:
    dims: list = field(default_factory=lambda: [2, 3])
    bump_width: float = 1.0
    r_max: float = 10.0
    panel: float = 0.25
    panel_order: int = 10
    lambda_max: float = 20.0
    dlambda: float = 0.02
    roundtrip_tol: float = 1e-4
    laplace_tol: float = 1e-3
    convolution_tol: float = 1e-4
    plancherel_tol: float = 1e-3
    k_odd_tol: float = 1e-5
    k_even_tol: float = 1e-3
    drift_tol: float = 0.1


@dataclass
class BoundsConfig:
    r_grid: list = _floats(1, 30, 59)
    lam_grid: list = _floats(0.1, 10, 100)
    rho_grid: list = _floats(1, 10, 91)
    t_grid: list = _floats(10, 160, 9)
    heat_b: float = 8.0
    rel_slack: float = 1e-9


@dataclass
class Config:
    seed: int = 0
    grid_scale: float = 1.0
    kernel: KernelConfig = field(default_factory=KernelConfig)
    limit: LimitConfig = field(default_factory=LimitConfig)
    spectrum: SpectrumConfig = field(default_factory=SpectrumConfig)
    decay: DecayConfig = field(default_factory=DecayConfig)
    heat: HeatConfig = field(default_factory=HeatConfig)
    main_theorem: MainTheoremConfig = field(default_factory=MainTheoremConfig)
    conservation: ConservationConfig = field(default_factory=ConservationConfig)
    transform: TransformConfig = field(default_factory=TransformConfig)
    bounds: BoundsConfig = field(default_factory=BoundsConfig)

    def to_dict(self) -> dict:
        return asdict(self)

    def scaled(self, n: int | float, minimum: int = 4) -> int:
        return max(minimum, int(round(n * self.grid_scale)))


_SECTIONS = [f.name for f in fields(Config) if f.name not in ("seed", "grid_scale")]


def _convert(raw: str, default: Any, where: str):
    try:
        if isinstance(default, bool):
            return raw.strip().lower() in ("1", "true", "yes", "on")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        if isinstance(default, list):
            items = [x.strip() for x in raw.split(",") if x.strip()]
            if default and isinstance(default[0], str):
                return items
            if default and isinstance(default[0], int) and not isinstance(default[0], bool):
                return [int(x) for x in items]
            return [float(x) for x in items]
        return raw.strip()
    except ValueError as exc:
        raise ConfigError(f"{where}: cannot parse {raw!r}") from exc


def from_parser(cp: configparser.ConfigParser) -> Config:
    cfg = Config()
    for sec in cp.sections():
        if sec == "general":
            for key, raw in cp[sec].items():
                if key not in ("seed", "grid_scale"):
                    raise ConfigError(f"[general]: unknown key {key!r}")
                setattr(cfg, key, _convert(raw, getattr(cfg, key), f"[general] {key}"))
            continue
        if sec not in _SECTIONS:
            raise ConfigError(f"unknown section [{sec}]")
        target = getattr(cfg, sec)
        names = {f.name for f in fields(target)}
        for key, raw in cp[sec].items():
            if key not in names:
                raise ConfigError(f"[{sec}]: unknown key {key!r}")
            setattr(target, key, _convert(raw, getattr(target, key), f"[{sec}] {key}"))
    return cfg


DEFAULTS_PATH = Path(__file__).with_name("defaults.ini")


def load_config(path: str | Path | None) -> Config:
    """Read a config file; ``None`` or ``"defaults"`` gives the built-in defaults."""
    if path is None or str(path) == "defaults":
        path = DEFAULTS_PATH
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    return from_parser(cp)
