"""Experiment configuration: flat ``key = value`` text files.

Blank lines and ``#`` comments are ignored. Lists are comma separated;
``linspace(start, stop, num)`` is accepted wherever a grid is expected.
Every error carries the offending line number.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .fading import FadingModel, make_model
from .optimizer import SystemParams, iavg_from_db
from .sensing import Method, SensingParams, SensingPerformance


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}".strip())


SWEEP_VARIABLES = ("gamma", "pd", "iavg_db")


@dataclass(frozen=True)
class ExperimentConfig:
    fading: str = "rayleigh"
    nakagami_m: int = 3
    M: int = 2
    M_list: tuple = (1, 2, 5, 10)
    T: float = 1.0
    N: float = 0.1
    Bc: float = 1e4
    B: float | None = None          # sensing bandwidth, defaults to Bc
    theta: float = 0.1
    rho: float = 0.1
    pd: float = 0.9
    pf: float = 0.2
    noise_power: float = 1.0        # W over the band
    primary_power: float = 1.0
    primary_noise_power: float = 1.0
    iavg_db: float = 0.0
    iavg_w: float | None = None     # overrides iavg_db when set
    p_max: float | None = None
    sweep: str | None = None
    grid: tuple | None = None
    N_list: tuple = (0.0001, 0.001, 0.01)
    pd_sweep: str = "roc"           # roc | fixed_pf
    sensing_method: str = "exact"
    frames: int = 1_000_000
    queue_frames: int = 10_000_000
    seed: int = 1
    out: str = "."

    # ----------------------------------------------------------- derived
    @property
    def model(self) -> FadingModel:
        return make_model(self.fading, self.nakagami_m)

    @property
    def sensing_bandwidth(self) -> float:
        return self.Bc if self.B is None else self.B

    @property
    def sigma_n2(self) -> float:
        return self.noise_power / self.Bc

    @property
    def sigma_sp2(self) -> float:
        return self.primary_power / self.Bc

    @property
    def I_avg(self) -> float:
        if self.iavg_w is not None:
            return self.iavg_w
        return iavg_from_db(self.iavg_db, self.primary_noise_power / self.Bc, self.Bc)

    def sensing_params(self, N: float | None = None) -> SensingParams:
        return SensingParams(N=self.N if N is None else N, B=self.sensing_bandwidth,
                             sigma_n2=self.sigma_n2, sigma_sp2=self.sigma_sp2,
                             method=Method(self.sensing_method))

    def system(self, M: int | None = None, pd: float | None = None, pf: float | None = None,
               I_avg: float | None = None) -> SystemParams:
        pd = self.pd if pd is None else pd
        pf = self.pf if pf is None else pf
        return SystemParams(
            M=self.M if M is None else M, T=self.T, N=self.N, Bc=self.Bc, theta=self.theta,
            rho=self.rho, sigma_n2=self.sigma_n2, sigma_sp2=self.sigma_sp2,
            I_avg=self.I_avg if I_avg is None else I_avg, model=self.model,
            perf=SensingPerformance.from_rates(pf, pd, self.rho), p_max=self.p_max,
        )

    def with_overrides(self, **kw) -> "ExperimentConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw) if kw else self


_INT_KEYS = {"nakagami_m", "M", "frames", "queue_frames", "seed"}
_FLOAT_KEYS = {"T", "N", "Bc", "B", "theta", "rho", "pd", "pf", "noise_power", "primary_power",
               "primary_noise_power", "iavg_db", "iavg_w", "p_max"}
_STR_KEYS = {"fading", "sweep", "pd_sweep", "sensing_method", "out"}
_INT_LIST_KEYS = {"M_list"}
_FLOAT_LIST_KEYS = {"grid", "N_list"}
KNOWN_KEYS = _INT_KEYS | _FLOAT_KEYS | _STR_KEYS | _INT_LIST_KEYS | _FLOAT_LIST_KEYS
assert KNOWN_KEYS == {f.name for f in fields(ExperimentConfig)}


def _parse_float(text: str) -> float:
    v = float(text)
    if not math.isfinite(v):
        raise ValueError(f"{text!r} is not finite")
    return v


def _parse_int(text: str) -> int:
    f = float(text)
    if not f.is_integer():
        raise ValueError(f"{text!r} is not an integer")
    return int(f)


def _parse_float_list(text: str) -> tuple:
    t = text.strip()
    if t.startswith("linspace(") and t.endswith(")"):
        parts = [s.strip() for s in t[len("linspace("):-1].split(",")]
        if len(parts) != 3:
            raise ValueError("linspace takes (start, stop, num)")
        start, stop, num = _parse_float(parts[0]), _parse_float(parts[1]), _parse_int(parts[2])
        if num < 1:
            raise ValueError("linspace needs num >= 1")
        # round away binary noise so grids print cleanly
        return tuple(float(np.round(v, 12)) for v in np.linspace(start, stop, num))
    return tuple(_parse_float(s) for s in t.split(",") if s.strip() != "")


def _parse_int_list(text: str) -> tuple:
    return tuple(_parse_int(s) for s in text.split(",") if s.strip() != "")


def parse_config_text(text: str, source: str | None = None) -> ExperimentConfig:
    values: dict = {}
    lines: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno, source)
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno, source)
        if key in values:
            raise ConfigError(f"duplicate key {key!r} (first set on line {lines[key]})",
                              lineno, source)
        if val == "":
            raise ConfigError(f"empty value for {key!r}", lineno, source)
        try:
            if key in _INT_KEYS:
                parsed = _parse_int(val)
            elif key in _FLOAT_KEYS:
                parsed = _parse_float(val)
            elif key in _INT_LIST_KEYS:
                parsed = _parse_int_list(val)
            elif key in _FLOAT_LIST_KEYS:
                parsed = _parse_float_list(val)
            else:
                parsed = val.lower() if key != "out" else val
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}", lineno, source) from None
        values[key] = parsed
        lines[key] = lineno
    cfg = ExperimentConfig(**values)
    validate_config(cfg, lines, source)
    return cfg


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot read config: {exc}", source=str(path)) from None
    return parse_config_text(text, source=str(path))


def validate_config(cfg: ExperimentConfig, lines: dict | None = None,
                    source: str | None = None) -> None:
    lines = lines or {}

    def fail(key, msg):
        raise ConfigError(msg, lines.get(key), source)

    if cfg.sweep is not None and cfg.sweep not in SWEEP_VARIABLES:
        fail("sweep", f"sweep must be one of {', '.join(SWEEP_VARIABLES)}")
    if cfg.grid is not None:
        if len(cfg.grid) == 0:
            fail("grid", "grid is empty")
        if any(b <= a for a, b in zip(cfg.grid, cfg.grid[1:])):
            fail("grid", "grid must be strictly increasing")
    if len(cfg.M_list) == 0 or any(m < 1 for m in cfg.M_list):
        fail("M_list", "M_list needs positive integers")
    if list(cfg.M_list) != sorted(set(cfg.M_list)):
        fail("M_list", "M_list must be strictly increasing")
    if len(cfg.N_list) == 0 or any(b <= a for a, b in zip(cfg.N_list, cfg.N_list[1:])):
        fail("N_list", "N_list must be nonempty and strictly increasing")
    if cfg.pd_sweep not in ("roc", "fixed_pf"):
        fail("pd_sweep", "pd_sweep must be 'roc' or 'fixed_pf'")
    if cfg.sensing_method not in ("exact", "gaussian"):
        fail("sensing_method", "sensing_method must be 'exact' or 'gaussian'")
    if cfg.fading not in ("rayleigh", "nakagami"):
        fail("fading", "fading must be 'rayleigh' or 'nakagami'")
    if cfg.nakagami_m < 1:
        fail("nakagami_m", "nakagami_m must be a positive integer")
    if cfg.iavg_w is not None and not cfg.iavg_w > 0:
        fail("iavg_w", "average interference cap must be positive")
    if cfg.frames < 1 or cfg.queue_frames < 1:
        fail("frames" if cfg.frames < 1 else "queue_frames", "frame counts must be positive")
    if cfg.seed < 0:
        fail("seed", "seed must be nonnegative")
    if cfg.Bc <= 0:
        fail("Bc", "Bc must be positive")
    try:
        cfg.system()
    except ValueError as exc:
        raise ConfigError(f"invalid system parameters: {exc}", source=source) from None
    for n in cfg.N_list:
        try:
            cfg.sensing_params(n)
        except ValueError as exc:
            fail("N_list", f"invalid sensing time {n}: {exc}")
