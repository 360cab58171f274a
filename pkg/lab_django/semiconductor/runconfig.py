# SPDX-License-Identifier: BSD-2-Clause
# Copyright  (c) 2024, The Euler-Poisson Lab Developers. All rights reserved.

"""
Run configuration files.

A run configuration is a flat list of ``section.key = value`` lines; ``#``
starts a comment. Values are coerced to the types below, validated against
``schemas/runconfig.json`` and completed with defaults. Every failure raises
ConfigurationError naming the dotted field.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field

import jsonschema
import numpy as np
from django.conf import settings

from .choices import NoiseReduction, NoiseShape
from .core.grid import Grid
from .core.pressure import PressureLaw
from .ensemble import EnsembleConfig
from .exceptions import ConfigurationError
from .integrator import IntegratorConfig, PerturbationSpec
from .noise import NoiseModel, default_mode_weights

logger = logging.getLogger(__name__)

with open(f"{os.path.dirname(__file__)}/schemas/runconfig.json") as f:
    RUNCONFIG_SCHEMA = json.load(f)

SECTIONS = ("physics", "grid", "time", "noise", "perturbation", "ensemble", "output")

_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}


def _as_bool(raw: str) -> bool:
    value = raw.strip().lower()
    if value in _TRUE:
        return True
    if value in _FALSE:
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _as_int_list(raw: str) -> list[int]:
    return [int(v) for v in raw.split(",") if v.strip()]


def _as_float_list(raw: str) -> list[float]:
    return [float(v) for v in raw.split(",") if v.strip()]


FIELD_TYPES = {
    "physics.gamma": float,
    "physics.kappa": float,
    "physics.rho_left": float,
    "physics.rho_right": float,
    "physics.phi_left": float,
    "physics.phi_right": float,
    "physics.jbar": float,
    "physics.voltage_mode": _as_bool,
    "physics.j_max": float,
    "physics.doping": str,
    "grid.n_cells": int,
    "time.t_end": float,
    "time.cfl": float,
    "time.snapshot_every": int,
    "time.artificial_viscosity": float,
    "time.seed": int,
    "noise.amplitude": float,
    "noise.modes": int,
    "noise.reduction": str,
    "noise.shape": str,
    "perturbation.amplitude": float,
    "perturbation.n_modes": int,
    "ensemble.n_paths": int,
    "ensemble.master_seed": int,
    "ensemble.moment_orders": _as_int_list,
    "ensemble.fit_lo": float,
    "ensemble.fit_hi": float,
    "ensemble.burn_in_fraction": float,
    "ensemble.delta_ladder": _as_float_list,
    "ensemble.record_points": int,
    "output.dir": str,
}

_TYPE_NAMES = {
    float: "a number",
    int: "an integer",
    str: "a string",
    _as_bool: "a boolean",
    _as_int_list: "a comma-separated list of integers",
    _as_float_list: "a comma-separated list of numbers",
}


@dataclass(frozen=True)
class PhysicsConfig:
    rho_left: float
    rho_right: float
    gamma: float = 2.0
    kappa: float = 1.0
    phi_left: float = 0.0
    phi_right: float = 0.0
    jbar: float = 0.0
    voltage_mode: bool = False
    j_max: float = 0.2
    doping: str = ""


@dataclass(frozen=True)
class GridConfig:
    n_cells: int = 200


@dataclass(frozen=True)
class TimeConfig:
    t_end: float = 10.0
    cfl: float = 0.4
    snapshot_every: int = 0
    artificial_viscosity: float = 0.0
    seed: int = 0


@dataclass(frozen=True)
class NoiseConfig:
    amplitude: float = 0.05
    modes: int = 16
    reduction: str = NoiseReduction.SINGLE_BROWNIAN
    shape: str = NoiseShape.RATIONAL


@dataclass(frozen=True)
class PerturbationConfig:
    amplitude: float = 0.01
    n_modes: int = 3


@dataclass(frozen=True)
class EnsembleSection:
    n_paths: int = 64
    master_seed: int = 0
    moment_orders: tuple[int, ...] = (1, 2, 3)
    fit_lo: float | None = None
    fit_hi: float | None = None
    burn_in_fraction: float = 0.5
    delta_ladder: tuple[float, ...] = (1e-5, 1e-4, 1e-3, 1e-2, 1e-1)
    record_points: int = 201


@dataclass(frozen=True)
class OutputConfig:
    dir: str | None = None


@dataclass(frozen=True)
class RunConfig:
    physics: PhysicsConfig
    grid: GridConfig = field(default_factory=GridConfig)
    time: TimeConfig = field(default_factory=TimeConfig)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    perturbation: PerturbationConfig = field(default_factory=PerturbationConfig)
    ensemble: EnsembleSection = field(default_factory=EnsembleSection)
    output: OutputConfig = field(default_factory=OutputConfig)
    source: str = "<string>"

    def pressure_law(self) -> PressureLaw:
        return PressureLaw(gamma=self.physics.gamma, kappa=self.physics.kappa)

    def make_grid(self) -> Grid:
        return Grid(self.grid.n_cells)

    def integrator_config(self) -> IntegratorConfig:
        return IntegratorConfig(
            cfl=self.time.cfl,
            artificial_viscosity=self.time.artificial_viscosity,
            t_end=self.time.t_end,
            snapshot_every=self.time.snapshot_every,
            seed=self.time.seed,
        )

    def noise_model(self) -> NoiseModel:
        return NoiseModel(
            amplitude=self.noise.amplitude,
            mode_weights=default_mode_weights(self.noise.modes),
            reduction=NoiseReduction(self.noise.reduction),
            shape=NoiseShape(self.noise.shape),
        )

    def perturbation_spec(self) -> PerturbationSpec:
        return PerturbationSpec(
            amplitude=self.perturbation.amplitude, n_modes=self.perturbation.n_modes
        )

    def ensemble_config(self, workers: int | None = None) -> EnsembleConfig:
        section = self.ensemble
        return EnsembleConfig(
            n_paths=section.n_paths,
            master_seed=section.master_seed,
            moment_orders=section.moment_orders,
            fit_window=self.fit_window if self.time.t_end > 0.0 else None,
            burn_in_fraction=section.burn_in_fraction,
            delta_ladder=section.delta_ladder,
            record_points=section.record_points,
            workers=workers,
        )

    @property
    def fit_window(self) -> tuple[float, float]:
        t_end = self.time.t_end
        lo = self.ensemble.fit_lo if self.ensemble.fit_lo is not None else t_end / 4.0
        hi = self.ensemble.fit_hi if self.ensemble.fit_hi is not None else 3.0 * t_end / 4.0
        return lo, hi

    @property
    def output_dir(self) -> str:
        return self.output.dir or str(settings.SEMICONDUCTOR_OUTPUT_DIR)

    def echo(self) -> dict:
        """
        Plain mapping of every resolved value, for output headers.
        """
        lo, hi = self.fit_window
        ensemble = {
            "n_paths": self.ensemble.n_paths,
            "master_seed": self.ensemble.master_seed,
            "moment_orders": list(self.ensemble.moment_orders),
            "fit_lo": lo,
            "fit_hi": hi,
            "burn_in_fraction": self.ensemble.burn_in_fraction,
            "delta_ladder": list(self.ensemble.delta_ladder),
            "record_points": self.ensemble.record_points,
        }
        return {
            "physics": vars(self.physics).copy(),
            "grid": vars(self.grid).copy(),
            "time": vars(self.time).copy(),
            "noise": {k: str(v) if isinstance(v, str) else v for k, v in vars(self.noise).items()},
            "perturbation": vars(self.perturbation).copy(),
            "ensemble": ensemble,
        }


def parse_lines(text: str) -> dict[str, str]:
    """
    Raw ``section.key -> value`` mapping from the file text.
    """
    raw = {}
    for number, line in enumerate(text.splitlines(), start=1):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        if "=" not in content:
            raise ConfigurationError(f"line {number}", f"expected 'section.key = value', got {content!r}")
        key, value = (part.strip() for part in content.split("=", 1))
        if key.count(".") != 1 or not all(key.split(".")):
            raise ConfigurationError(key or f"line {number}", "keys have the form section.key")
        if key in raw:
            raise ConfigurationError(key, f"repeated on line {number}")
        raw[key] = value
    return raw


def coerce(raw: dict[str, str]) -> dict[str, dict]:
    document = {section: {} for section in SECTIONS}
    for key, value in raw.items():
        section, name = key.split(".")
        if section not in SECTIONS:
            raise ConfigurationError(key, f"unknown section {section!r}")
        converter = FIELD_TYPES.get(key)
        if converter is None:
            raise ConfigurationError(key, "unknown field")
        try:
            converted = converter(value)
        except (ValueError, TypeError) as e:
            raise ConfigurationError(key, f"expected {_TYPE_NAMES[converter]}, got {value!r}") from e
        if converter in (float, _as_float_list) and not np.all(np.isfinite(converted)):
            raise ConfigurationError(key, f"expected finite numbers, got {value!r}")
        document[section][name] = converted
    return document


def _error_field(error: jsonschema.exceptions.ValidationError) -> tuple[str, str]:
    path = [str(p) for p in error.absolute_path][:2]
    if error.validator == "required":
        missing = [k for k in error.validator_value if k not in error.instance]
        return ".".join(path + missing[:1]), "required field is missing"
    if error.validator == "additionalProperties" and len(path) < 2:
        extra = sorted(set(error.instance) - set(error.schema.get("properties", {})))
        return ".".join(path + extra[:1]), "unknown field"
    return ".".join(path), error.message


def validate(document: dict):
    validator = jsonschema.Draft7Validator(RUNCONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(document), key=lambda e: [str(p) for p in e.absolute_path])
    if errors:
        name, message = _error_field(errors[0])
        raise ConfigurationError(name, message)


def _check_fit_window(config: RunConfig):
    lo, hi = config.fit_window
    t_end = config.time.t_end
    if not lo < hi:
        raise ConfigurationError("ensemble.fit_lo", f"fit window start {lo} must be below its end {hi}")
    if hi > t_end:
        raise ConfigurationError("ensemble.fit_hi", f"fit window end {hi} exceeds time.t_end = {t_end}")


def build(document: dict, source: str = "<string>") -> RunConfig:
    ensemble = dict(document["ensemble"])
    for name in ("moment_orders", "delta_ladder"):
        if name in ensemble:
            ensemble[name] = tuple(ensemble[name])
    config = RunConfig(
        physics=PhysicsConfig(**document["physics"]),
        grid=GridConfig(**document["grid"]),
        time=TimeConfig(**document["time"]),
        noise=NoiseConfig(**document["noise"]),
        perturbation=PerturbationConfig(**document["perturbation"]),
        ensemble=EnsembleSection(**ensemble),
        output=OutputConfig(**document["output"]),
        source=source,
    )
    if config.time.t_end > 0.0:
        _check_fit_window(config)
    return config


def parse_run_config(
    text: str, source: str = "<string>", overrides: dict[str, str] | None = None
) -> RunConfig:
    """
    Parse configuration text. `overrides` are raw ``section.key -> value``
    strings applied on top of the file, as the command-line flags do.
    """
    raw = parse_lines(text)
    raw.update({k: str(v) for k, v in (overrides or {}).items()})
    document = coerce(raw)
    validate(document)
    config = build(document, source)
    logger.debug(f"Loaded run configuration from {source}")
    return config


def load_run_config(path, overrides: dict[str, str] | None = None) -> RunConfig:
    try:
        with open(path) as f:
            text = f.read()
    except OSError as e:
        raise ConfigurationError("config", f"cannot read {path}: {e.strerror}") from e
    return parse_run_config(text, source=str(path), overrides=overrides)
