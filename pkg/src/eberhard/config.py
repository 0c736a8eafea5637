"""YAML run configuration: loading, validation, and typed access.

Validation is strict in both directions: unknown keys anywhere in the
tree are an error (they are usually typos that would otherwise silently
fall back to defaults), and missing required keys are reported together
rather than one at a time.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import yaml

from .model import EfficiencyPair, Settings
from .vienna import ViennaExperiment, ViennaState

SCENARIOS = ("sweep-eta", "sweep-eta-pair", "vienna", "fluctuation", "verify-eigen")


class ConfigError(ValueError):
    """Invalid, incomplete, or unknown configuration content."""


def _type_name(expected) -> str:
    if isinstance(expected, tuple):
        return " or ".join(t.__name__ for t in expected)
    return expected.__name__


class _Section:
    """One mapping node with path-aware typed extraction."""

    def __init__(self, data, path: str):
        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise ConfigError(f"{path or 'top level'}: expected a mapping")
        self._data = dict(data)
        self._path = path

    def _key_path(self, key: str) -> str:
        return f"{self._path}.{key}" if self._path else key

    def take(self, key: str, expected, *, required: bool = False, default=None):
        if key not in self._data:
            if required:
                raise ConfigError(f"missing required key {self._key_path(key)!r}")
            return default
        value = self._data.pop(key)
        if expected is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if expected is not None and not isinstance(value, expected):
            raise ConfigError(
                f"{self._key_path(key)}: expected {_type_name(expected)}, "
                f"got {type(value).__name__}"
            )
        if isinstance(value, bool) and expected in (int, float):
            raise ConfigError(f"{self._key_path(key)}: expected a number, got bool")
        return value

    def section(self, key: str, *, required: bool = False) -> "_Section":
        raw = self.take(key, dict, required=required, default={})
        return _Section(raw, self._key_path(key))

    def missing(self, keys) -> list[str]:
        return [self._key_path(k) for k in keys if k not in self._data]

    def finish(self) -> None:
        if self._data:
            names = ", ".join(sorted(self._key_path(k) for k in self._data))
            raise ConfigError(f"unknown configuration keys: {names}")


def _parse_grid(sec: _Section, key: str, *, required: bool = True) -> tuple[float, ...]:
    """A grid is either {values: [..]} or {start, stop, step} inclusive of
    stop up to half a step of roundoff."""
    node = sec.take(key, (dict, list), required=required)
    if node is None:
        return ()
    path = f"{sec._path}.{key}" if sec._path else key
    if isinstance(node, list):
        values = node
    else:
        grid = _Section(node, path)
        values = grid.take("values", list)
        if values is None:
            start = grid.take("start", float, required=True)
            stop = grid.take("stop", float, required=True)
            step = grid.take("step", float, required=True)
            grid.finish()
            if step <= 0:
                raise ConfigError(f"{path}.step must be > 0")
            if stop < start:
                raise ConfigError(f"{path}: stop must be >= start")
            count = int(round((stop - start) / step)) + 1
            values = [start + i * step for i in range(count)]
            values = [v for v in values if v <= stop + 0.5 * step]
        else:
            grid.finish()
    out = []
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{path}: grid entries must be numbers")
        out.append(float(v))
    if not out:
        raise ConfigError(f"{path}: grid is empty")
    if not all(np.isfinite(out)):
        raise ConfigError(f"{path}: grid entries must be finite")
    return tuple(out)


@dataclass(frozen=True)
class OptimizerSettings:
    n_starts: int = 16
    max_iter: int = 5000
    f_tol: float = 1e-12
    x_tol: float = 1e-10

    def __post_init__(self):
        if self.n_starts < 1:
            raise ConfigError("optimizer.n_starts must be >= 1")
        if self.max_iter < 1:
            raise ConfigError("optimizer.max_iter must be >= 1")
        if self.f_tol <= 0 or self.x_tol <= 0:
            raise ConfigError("optimizer tolerances must be > 0")


@dataclass(frozen=True)
class OutputSettings:
    precision: int = 6
    plot_data: bool = False
    workers: int = 1

    def __post_init__(self):
        if not 1 <= self.precision <= 17:
            raise ConfigError("output.precision must be in [1, 17]")
        if self.workers < 1:
            raise ConfigError("output.workers must be >= 1")


def _parse_optimizer(sec: _Section) -> OptimizerSettings:
    opt = sec.section("optimizer")
    settings = OptimizerSettings(
        n_starts=opt.take("n_starts", int, default=16),
        max_iter=opt.take("max_iter", int, default=5000),
        f_tol=opt.take("f_tol", float, default=1e-12),
        x_tol=opt.take("x_tol", float, default=1e-10),
    )
    opt.finish()
    return settings


def _parse_output(sec: _Section) -> OutputSettings:
    out = sec.section("output")
    settings = OutputSettings(
        precision=out.take("precision", int, default=6),
        plot_data=out.take("plot_data", bool, default=False),
        workers=out.take("workers", int, default=1),
    )
    out.finish()
    return settings


@dataclass(frozen=True)
class SweepEtaConfig:
    eta_grid: tuple[float, ...]
    zeta: float
    seed: int
    optimizer: OptimizerSettings
    output: OutputSettings


@dataclass(frozen=True)
class SweepEtaPairConfig:
    eta1_grid: tuple[float, ...]
    eta2_grid: tuple[float, ...]
    zeta: float
    seed: int
    optimizer: OptimizerSettings
    output: OutputSettings


@dataclass(frozen=True)
class ViennaConfig:
    experiment: ViennaExperiment
    seed: int
    optimizer: OptimizerSettings
    output: OutputSettings


@dataclass(frozen=True)
class FluctuationConfig:
    eta_grid: tuple[float, ...]
    delta_deg: float
    quad_order: int
    zeta: float
    seed: int
    optimizer: OptimizerSettings
    output: OutputSettings


@dataclass(frozen=True)
class VerifyEigenConfig:
    eta_grid: tuple[float, ...]
    zeta: float
    r_offset: float
    seed: int
    optimizer: OptimizerSettings
    output: OutputSettings


def _check_etas(values, path: str) -> None:
    for v in values:
        if not 0.0 < v <= 1.0:
            raise ConfigError(f"{path}: efficiency {v!r} outside (0, 1]")


def _parse_sweep_eta(sec: _Section) -> SweepEtaConfig:
    grid = _parse_grid(sec, "eta_grid")
    _check_etas(grid, "eta_grid")
    cfg = SweepEtaConfig(
        eta_grid=grid,
        zeta=sec.take("zeta", float, default=0.0),
        seed=sec.take("seed", int, default=0),
        optimizer=_parse_optimizer(sec),
        output=_parse_output(sec),
    )
    if cfg.zeta < 0:
        raise ConfigError("zeta must be >= 0")
    return cfg


def _parse_sweep_eta_pair(sec: _Section) -> SweepEtaPairConfig:
    grid1 = _parse_grid(sec, "eta1_grid")
    grid2 = _parse_grid(sec, "eta2_grid")
    _check_etas(grid1, "eta1_grid")
    _check_etas(grid2, "eta2_grid")
    cfg = SweepEtaPairConfig(
        eta1_grid=grid1,
        eta2_grid=grid2,
        zeta=sec.take("zeta", float, default=0.0),
        seed=sec.take("seed", int, default=0),
        optimizer=_parse_optimizer(sec),
        output=_parse_output(sec),
    )
    if cfg.zeta < 0:
        raise ConfigError("zeta must be >= 0")
    return cfg


_VIENNA_REQUIRED = ("r", "visibility", "eta1", "eta2", "n_pairs", "t_run", "tau_c", "zeta")
_ANGLES_REQUIRED = ("alpha1", "alpha2", "beta1", "beta2")


def _parse_vienna(sec: _Section) -> ViennaConfig:
    exp_sec = sec.section("experiment", required=True)
    missing = exp_sec.missing(_VIENNA_REQUIRED)
    ang_sec = sec.section("angles", required=True)
    missing += ang_sec.missing(_ANGLES_REQUIRED)
    if missing:
        raise ConfigError("missing required keys: " + ", ".join(missing))

    fields = {k: exp_sec.take(k, float, required=True) for k in _VIENNA_REQUIRED}
    exp_sec.finish()
    angles = {k: ang_sec.take(k, float, required=True) for k in _ANGLES_REQUIRED}
    ang_sec.finish()

    try:
        experiment = ViennaExperiment(
            state=ViennaState(r=fields["r"], visibility=fields["visibility"]),
            eff=EfficiencyPair(eta1=fields["eta1"], eta2=fields["eta2"]),
            n_pairs=fields["n_pairs"],
            t_run=fields["t_run"],
            tau_c=fields["tau_c"],
            zeta=fields["zeta"],
            angles=Settings(**angles),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return ViennaConfig(
        experiment=experiment,
        seed=sec.take("seed", int, default=0),
        optimizer=_parse_optimizer(sec),
        output=_parse_output(sec),
    )


def _parse_fluctuation(sec: _Section) -> FluctuationConfig:
    grid = _parse_grid(sec, "eta_grid")
    _check_etas(grid, "eta_grid")
    delta = sec.take("delta_deg", float, required=True)
    if not (np.isfinite(delta) and delta >= 0.0):
        raise ConfigError("delta_deg must be finite and >= 0")
    order = sec.take("quad_order", int, default=8)
    if order < 2:
        raise ConfigError("quad_order must be >= 2")
    cfg = FluctuationConfig(
        eta_grid=grid,
        delta_deg=delta,
        quad_order=order,
        zeta=sec.take("zeta", float, default=0.0),
        seed=sec.take("seed", int, default=0),
        optimizer=_parse_optimizer(sec),
        output=_parse_output(sec),
    )
    if cfg.zeta < 0:
        raise ConfigError("zeta must be >= 0")
    return cfg


def _parse_verify_eigen(sec: _Section) -> VerifyEigenConfig:
    grid = _parse_grid(sec, "eta_grid")
    _check_etas(grid, "eta_grid")
    cfg = VerifyEigenConfig(
        eta_grid=grid,
        zeta=sec.take("zeta", float, default=0.0),
        r_offset=sec.take("r_offset", float, default=0.0),
        seed=sec.take("seed", int, default=0),
        optimizer=_parse_optimizer(sec),
        output=_parse_output(sec),
    )
    if cfg.zeta < 0:
        raise ConfigError("zeta must be >= 0")
    if not np.isfinite(cfg.r_offset):
        raise ConfigError("r_offset must be finite")
    return cfg


_PARSERS = {
    "sweep-eta": _parse_sweep_eta,
    "sweep-eta-pair": _parse_sweep_eta_pair,
    "vienna": _parse_vienna,
    "fluctuation": _parse_fluctuation,
    "verify-eigen": _parse_verify_eigen,
}


def parse_config(data: dict, scenario: str, overrides: dict | None = None):
    """Validate a raw mapping for one scenario and return its typed config.

    overrides (seed, precision, quad_order) replace the corresponding
    config values before validation; the command line wins over the file.
    """
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}; expected one of {SCENARIOS}")
    sec = _Section(data, "")
    declared = sec.take("scenario", str)
    if declared is not None and declared != scenario:
        raise ConfigError(
            f"config declares scenario {declared!r} but {scenario!r} was requested"
        )
    if overrides:
        for key, value in overrides.items():
            if value is None:
                continue
            if key in ("seed", "quad_order"):
                sec._data[key] = int(value)
            elif key == "precision":
                out = sec._data.get("output")
                out = dict(out) if isinstance(out, dict) else {}
                out["precision"] = int(value)
                sec._data["output"] = out
            else:
                raise ValueError(f"unsupported override {key!r}")
    cfg = _PARSERS[scenario](sec)
    sec.finish()
    return cfg


def load_config(path: str, scenario: str, overrides: dict | None = None):
    """Read a YAML file and validate it for the scenario."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return parse_config(data, scenario, overrides)
