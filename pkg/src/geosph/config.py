"""Run configuration: flat key-value file format, presets, validation.

Config files are plain ``key = value`` lines (# comments allowed); every key
is a SimConfig field.  Scenario presets load first, then the file, then any
``--set key=value`` overrides, so sweeps can be scripted from one base file.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

from .constitutive import MaterialParams
from .particles import StepControls
from .stabilizer import _MODE_ALIASES, StabilizerMode

__all__ = ["ConfigError", "SimConfig", "parse_config_text", "apply_overrides"]

SCENARIOS = ("cylinder_drop", "vertical_cut", "custom")


class ConfigError(ValueError):
    """Invalid configuration; the message lists every offending field."""


@dataclass
class SimConfig:
    # scenario and stabilization
    scenario: str = "vertical_cut"
    stabilizer: str = "adaptive"
    eps_as: float = 0.5
    as_exponent: float = 4.0
    knot_compression: float = 0.2
    eta_immediate: float = 0.05

    # discretization and stepping
    spacing: float = 0.025
    h: float = 0.0              # 0 -> h_factor * spacing
    h_factor: float = 1.5
    kernel_b: float = 2.0
    dt: float = 0.0             # 0 -> CFL bound alone; else min(dt, CFL bound)
    cfl_number: float = 0.1
    end_time: float = 2.0

    # material
    rho0: float = 1850.0
    E: float = 1.5e6
    nu: float = 0.2
    cohesion: float = 5e3
    friction_deg: float = 20.0
    dilatancy_deg: float = 0.0

    # forcing and viscosity
    gravity: float = 9.81
    gamma1: float = 1.0
    gamma2: float = 0.0
    eps_visc: float = 0.01
    chi_max: float = 1.5

    # geometry: cylinder_drop
    drop_diameter: float = 0.05
    drop_speed: float = 5.0
    drop_gap: float = 0.0015
    drop_pad: float = 0.58      # disc sampling: keep lattice points within r + pad*s
    floor_length: float = 0.334

    # geometry: vertical_cut / custom
    block_width: float = 4.0
    block_height: float = 2.0
    floor_extent: float = 8.0
    left_wall: bool = True

    # output
    out_dir: str = "out"
    formats: str = "csv"
    snapshot_interval: float = 0.1
    log_every: int = 1

    # --- derived accessors -------------------------------------------------

    @property
    def smoothing_length(self) -> float:
        return self.h if self.h > 0.0 else self.h_factor * self.spacing

    def material(self) -> MaterialParams:
        return MaterialParams(
            rho0=self.rho0,
            E=self.E,
            nu=self.nu,
            c=self.cohesion,
            phi=math.radians(self.friction_deg),
            psi=math.radians(self.dilatancy_deg),
        )

    def controls(self) -> StepControls:
        mat = self.material()
        bound = self.cfl_number * self.smoothing_length / mat.sound_speed
        dt = min(self.dt, bound) if self.dt > 0.0 else bound
        return StepControls(
            dt=dt,
            gamma1=self.gamma1,
            gamma2=self.gamma2,
            eps_visc=self.eps_visc,
            gravity=(0.0, -self.gravity),
            cfl_number=self.cfl_number,
            chi_max=self.chi_max,
        )

    def mode(self) -> StabilizerMode:
        return StabilizerMode(
            kind=self.stabilizer,
            eps_as=self.eps_as,
            exponent_n=self.as_exponent,
            knot_compression=self.knot_compression,
            eta_immediate=self.eta_immediate,
        )

    def snapshot_formats(self) -> list:
        return [f.strip() for f in self.formats.split(",") if f.strip()]

    # --- construction ------------------------------------------------------

    @classmethod
    def for_scenario(cls, scenario: str) -> "SimConfig":
        """Defaults reproducing the reference setups of each scenario."""
        if scenario == "cylinder_drop":
            return cls(
                scenario="cylinder_drop",
                spacing=0.0005,
                dt=1e-6,
                end_time=0.004,
                E=5e6,
                cohesion=30e3,
                friction_deg=22.0,
                gamma1=1.0,
                gamma2=1.0,
                snapshot_interval=0.0005,
            )
        if scenario == "vertical_cut":
            return cls(scenario="vertical_cut", spacing=0.025, dt=5e-5, end_time=2.0,
                       gamma1=1.0, gamma2=0.0)
        if scenario == "custom":
            return cls(scenario="custom")
        raise ConfigError(f"unknown scenario {scenario!r}; expected one of {SCENARIOS}")

    def validate(self) -> "SimConfig":
        errors = []
        if self.scenario not in SCENARIOS:
            errors.append(f"scenario must be one of {SCENARIOS}, got {self.scenario!r}")
        if self.stabilizer not in _MODE_ALIASES:
            errors.append(f"stabilizer must be one of {sorted(set(_MODE_ALIASES))}, got {self.stabilizer!r}")
        if not 0.0 <= self.eps_as <= 1.0:
            errors.append(f"eps_as must lie in [0, 1], got {self.eps_as}")
        if self.as_exponent <= 0.0:
            errors.append(f"as_exponent must be positive, got {self.as_exponent}")
        if self.spacing <= 0.0:
            errors.append(f"spacing must be positive, got {self.spacing}")
        if self.h < 0.0:
            errors.append(f"h must be non-negative (0 selects h_factor*spacing), got {self.h}")
        if self.h_factor <= 0.0:
            errors.append(f"h_factor must be positive, got {self.h_factor}")
        if self.kernel_b <= 0.0:
            errors.append(f"kernel_b must be positive, got {self.kernel_b}")
        if self.dt < 0.0:
            errors.append(f"dt must be non-negative (0 selects the CFL bound), got {self.dt}")
        if self.cfl_number <= 0.0:
            errors.append(f"cfl_number must be positive, got {self.cfl_number}")
        if self.end_time <= 0.0:
            errors.append(f"end_time must be positive, got {self.end_time}")
        if self.rho0 <= 0.0:
            errors.append(f"rho0 must be positive, got {self.rho0}")
        if self.E <= 0.0:
            errors.append(f"E must be positive, got {self.E}")
        if not 0.0 <= self.nu < 0.5:
            errors.append(f"nu must lie in [0, 0.5), got {self.nu}")
        if self.cohesion < 0.0:
            errors.append(f"cohesion must be non-negative, got {self.cohesion}")
        if not 0.0 <= self.friction_deg < 90.0:
            errors.append(f"friction_deg must lie in [0, 90), got {self.friction_deg}")
        if not 0.0 <= self.dilatancy_deg < 90.0:
            errors.append(f"dilatancy_deg must lie in [0, 90), got {self.dilatancy_deg}")
        if self.gamma1 < 0.0 or self.gamma2 < 0.0:
            errors.append("gamma1 and gamma2 must be non-negative, "
                          f"got {self.gamma1}, {self.gamma2}")
        if self.chi_max < 1.0:
            errors.append(f"chi_max must be at least 1, got {self.chi_max}")
        if self.snapshot_interval <= 0.0:
            errors.append(f"snapshot_interval must be positive, got {self.snapshot_interval}")
        unknown = [f for f in self.snapshot_formats() if f not in ("csv", "vtk")]
        if unknown:
            errors.append(f"formats may contain only csv/vtk, got {unknown}")
        if self.scenario == "cylinder_drop" and self.spacing >= self.drop_diameter:
            errors.append(
                f"spacing {self.spacing} must be smaller than drop_diameter {self.drop_diameter}")
        if self.scenario in ("vertical_cut", "custom"):
            if self.block_width <= 0.0 or self.block_height <= 0.0:
                errors.append("block_width and block_height must be positive, "
                              f"got {self.block_width}, {self.block_height}")
            if self.floor_extent < self.block_width:
                errors.append("floor_extent must cover the block width, "
                              f"got {self.floor_extent} < {self.block_width}")
        if errors:
            raise ConfigError("invalid configuration:\n  " + "\n  ".join(errors))
        return self


_FIELDS = {f.name: f for f in dataclasses.fields(SimConfig)}


def _coerce(name: str, raw: str):
    field = _FIELDS.get(name)
    if field is None:
        raise ConfigError(f"unknown configuration key {name!r}")
    raw = raw.strip()
    if field.type in ("bool", bool):
        if raw.lower() in ("true", "1", "yes", "on"):
            return True
        if raw.lower() in ("false", "0", "no", "off"):
            return False
        raise ConfigError(f"key {name} expects a boolean, got {raw!r}")
    if field.type in ("int", int):
        try:
            return int(raw)
        except ValueError as exc:
            raise ConfigError(f"key {name} expects an integer, got {raw!r}") from exc
    if field.type in ("float", float):
        try:
            return float(raw)
        except ValueError as exc:
            raise ConfigError(f"key {name} expects a number, got {raw!r}") from exc
    return raw


def parse_config_text(text: str, base: SimConfig = None) -> SimConfig:
    """Parse ``key = value`` lines on top of ``base`` (or scenario defaults).

    A ``scenario`` line switches the preset before the remaining keys apply,
    so one file fully determines a run.
    """
    pairs = []
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = stripped.partition("=")
        pairs.append((key.strip(), value.strip()))

    cfg = base
    if cfg is None:
        scenario = dict(pairs).get("scenario", "vertical_cut")
        cfg = SimConfig.for_scenario(scenario)
    for key, value in pairs:
        setattr(cfg, key, _coerce(key, value))
    return cfg


def apply_overrides(cfg: SimConfig, overrides) -> SimConfig:
    """Apply a list of 'key=value' strings (CLI --set)."""
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, _, value = item.partition("=")
        setattr(cfg, key.strip(), _coerce(key.strip(), value))
    return cfg
