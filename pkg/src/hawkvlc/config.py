"""Experiment configuration: flat key-value file with simulation defaults.

Config files are flat YAML mappings; every key below is optional and
defaults to the standard simulation setup (20 users on a 10 m x 10 m
ground square under a 3 m hover, 20 mW budget, 20 MHz band, -104 dBm
noise, 45 degree field of view). CLI flags override file values. Physical
units are converted at this boundary: powers are configured in mW, noise
in dBm, rates in kbps, angles in degrees, detector area in cm^2; the
model itself works in W / Hz / radians / m^2.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path

import yaml

from . import vlc

SWEEP_PARAMETERS = ("p_max", "fov", "disc_radius", "altitude", "n_users")
SCHEMES = ("hhopap", "grpa", "randp", "ofdma")


@dataclass(frozen=True)
class ExperimentConfig:
    # scenario
    n_users: int = 20
    disc_radius_m: float = 10.0
    user_area_scale: float = 1.0      # ground square side = scale * disc radius
    altitude_m: float = 3.0
    p_max_mw: float = 20.0
    dc_bias: float = 20.0
    peak_intensity: float = 30.0
    delta: float = 3.0 * math.sqrt(5.0) / 5.0
    noise_dbm: float = -104.0
    bandwidth_hz: float = 20e6
    theta: float = 1.0
    rate_min_kbps: float = 0.0
    fov_deg: float = 45.0
    semiangle_deg: float = 60.0
    detector_area_cm2: float = 1.0
    filter_gain: float = 1.0
    refractive_index: float = 1.5
    # optimizer
    population: int = 30
    iterations: int = 350
    # experiment harness
    master_seed: int = 1
    realizations: int = 100
    schemes: tuple = SCHEMES
    sweep_parameter: str = "p_max"
    sweep_values: tuple = (20.0, 40.0, 60.0, 80.0, 100.0)
    convergence_n_users: tuple = (10, 20)
    convergence_rate_min_kbps: float = 200.0
    parallel: int = 1
    # trainer
    trainer_algorithms: tuple = ("hho", "pso", "es", "ga")
    trainer_loss: str = "sum_rate"
    trainer_population: int = 50
    trainer_iterations: int = 300
    trainer_batch: int = 20
    trainer_weight_bound: float = 10.0
    trainer_tolerance: float = 1e-12
    trainer_hidden: int = 5           # hidden layer size for dataset-mode training

    def __post_init__(self):
        if self.sweep_parameter not in SWEEP_PARAMETERS:
            raise ValueError(f"sweep_parameter must be one of {SWEEP_PARAMETERS}")
        if len(self.sweep_values) == 0:
            raise ValueError("sweep_values must be non-empty")
        if self.realizations < 1:
            raise ValueError("realizations must be at least 1")
        if self.master_seed < 0:
            raise ValueError("master_seed must be a non-negative integer")
        unknown = [s for s in self.schemes if s not in SCHEMES]
        if unknown:
            raise ValueError(f"unknown schemes {unknown}; valid: {SCHEMES}")
        for name in ("schemes", "sweep_values", "convergence_n_users", "trainer_algorithms"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    # unit conversions ------------------------------------------------------

    @property
    def p_max_w(self) -> float:
        return self.p_max_mw * 1e-3

    @property
    def noise_w(self) -> float:
        return 10.0 ** (self.noise_dbm / 10.0) * 1e-3

    @property
    def rate_min_bps(self) -> float:
        return self.rate_min_kbps * 1e3

    @property
    def square_side_m(self) -> float:
        return self.user_area_scale * self.disc_radius_m

    def optics(self) -> vlc.OpticalParams:
        return vlc.OpticalParams(
            detector_area=self.detector_area_cm2 * 1e-4,
            filter_gain=self.filter_gain,
            refractive_index=self.refractive_index,
            fov_rad=math.radians(self.fov_deg),
            semiangle_rad=math.radians(self.semiangle_deg),
        )

    def scenario_for_users(self, users) -> vlc.Scenario:
        return vlc.Scenario(
            users=users,
            altitude=self.altitude_m,
            disc_radius=self.disc_radius_m,
            p_max=self.p_max_w,
            dc_bias=self.dc_bias,
            peak_intensity=self.peak_intensity,
            delta=self.delta,
            noise_power=self.noise_w,
            bandwidth=self.bandwidth_hz,
            theta=self.theta,
            rate_min=self.rate_min_bps,
            optics=self.optics(),
        )

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def with_sweep_value(self, parameter: str, value) -> "ExperimentConfig":
        """Apply one sweep point, in config units (mW, degrees, meters, count)."""
        if parameter == "p_max":
            return self.replace(p_max_mw=float(value))
        if parameter == "fov":
            return self.replace(fov_deg=float(value))
        if parameter == "disc_radius":
            return self.replace(disc_radius_m=float(value))
        if parameter == "altitude":
            return self.replace(altitude_m=float(value))
        if parameter == "n_users":
            return self.replace(n_users=int(value))
        raise ValueError(f"unknown sweep parameter {parameter!r}")


def load_config(path=None, overrides: dict | None = None) -> ExperimentConfig:
    """Build a config from an optional flat YAML file plus override keys."""
    values: dict = {}
    if path is not None:
        raw = yaml.safe_load(Path(path).read_text())
        if raw is None:
            raw = {}
        if not isinstance(raw, dict):
            raise ValueError(f"config file {path} must contain a flat key-value mapping")
        values.update(raw)
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})

    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(unknown)}")
    return ExperimentConfig(**values)
