"""Optical downlink model: Lambertian LoS channel gains, NOMA rates, constraints.

A hovering transmitter with a downward-facing LED serves ground users whose
photodetectors face straight up, so the irradiance and incidence angles
coincide and cos(angle) = altitude / distance for every link. Users whose
incidence angle exceeds their field of view receive zero gain. Rates follow
the power-domain NOMA convention: receivers cancel every weaker-channel
user's signal and are interfered only by stronger-channel users.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

# per-user transmit powers in watts, indexed by original user id
PowerAllocation = np.ndarray


@dataclass(frozen=True)
class OpticalParams:
    """Receiver/emitter optics for the Lambertian line-of-sight link."""

    detector_area: float = 1e-4          # m^2
    filter_gain: float = 1.0
    refractive_index: float = 1.5
    fov_rad: float = math.radians(45.0)
    semiangle_rad: float = math.radians(60.0)

    def __post_init__(self):
        if not 0.0 < self.fov_rad < math.pi / 2:
            raise ValueError("field of view must lie in (0, pi/2)")
        if not 0.0 < self.semiangle_rad < math.pi / 2:
            raise ValueError("half-power semiangle must lie in (0, pi/2)")

    @cached_property
    def lambertian_order(self) -> float:
        return -math.log(2.0) / math.log(math.cos(self.semiangle_rad))

    @cached_property
    def concentrator_gain(self) -> float:
        return self.refractive_index**2 / math.sin(self.fov_rad) ** 2

    @cached_property
    def gain_factor(self) -> float:
        """Geometry-independent prefactor: A * (m+1)/(2*pi) * T_s * g."""
        m = self.lambertian_order
        return self.detector_area * (m + 1.0) / (2.0 * math.pi) * self.filter_gain * self.concentrator_gain


@dataclass(frozen=True)
class Scenario:
    """One problem instance: user layout, optics, power and QoS limits."""

    users: np.ndarray                     # (N, 2) ground positions, m
    altitude: float = 3.0                 # m
    disc_radius: float = 10.0             # m
    p_max: float = 0.02                   # W
    dc_bias: float = 20.0
    peak_intensity: float = 30.0
    delta: float = 3.0 * math.sqrt(5.0) / 5.0
    noise_power: float = 3.9810717055349695e-14  # W (-104 dBm)
    bandwidth: float = 20e6               # Hz
    theta: float = 1.0
    rate_min: float = 0.0                 # bit/s
    optics: OpticalParams = field(default_factory=OpticalParams)

    def __post_init__(self):
        users = np.atleast_2d(np.asarray(self.users, dtype=float))
        if users.ndim != 2 or users.shape[1] != 2:
            raise ValueError("users must be an (N, 2) array of ground positions")
        if users.shape[0] < 2:
            raise ValueError("at least two users are required")
        object.__setattr__(self, "users", users)
        if not 0.0 < self.dc_bias < self.peak_intensity:
            raise ValueError("need 0 < dc_bias < peak_intensity")
        if self.delta <= 0 or self.p_max <= 0 or self.altitude <= 0:
            raise ValueError("delta, p_max and altitude must be positive")

    @property
    def n_users(self) -> int:
        return self.users.shape[0]

    @cached_property
    def optical_budget(self) -> float:
        """Cap on sum of sqrt powers from non-negativity and eye safety."""
        return min(self.dc_bias, self.peak_intensity - self.dc_bias) / self.delta


@dataclass(frozen=True)
class Placement:
    """Horizontal transmitter position; altitude lives on the scenario."""

    x: float
    y: float

    def radius_sq(self) -> float:
        return self.x * self.x + self.y * self.y


@dataclass(frozen=True)
class ChannelState:
    """Per-user gains and the gain-ascending decode order."""

    gains: np.ndarray
    distances: np.ndarray
    decode_order: np.ndarray          # user ids sorted by ascending gain
    normalized_gains: np.ndarray      # gains / noise power


def distance(placement: Placement, user, altitude: float) -> float:
    """Euclidean distance from the hovering transmitter to a ground user."""
    dx = placement.x - user[0]
    dy = placement.y - user[1]
    return math.sqrt(dx * dx + dy * dy + altitude * altitude)


def channel_gain(placement: Placement, user, scenario: Scenario) -> float:
    """DC gain of one link, zero when the user is outside its field of view."""
    d = distance(placement, user, scenario.altitude)
    cos_inc = scenario.altitude / d
    if cos_inc < math.cos(scenario.optics.fov_rad):
        return 0.0
    m = scenario.optics.lambertian_order
    return scenario.optics.gain_factor * cos_inc ** (m + 1.0) / (d * d)


def channel_state(placement: Placement, scenario: Scenario) -> ChannelState:
    """Vectorized gains for all users plus the SIC decode order.

    Equal gains are ordered by ascending user id so the decode order is a
    deterministic total order.
    """
    opt = scenario.optics
    h = scenario.altitude
    dx = placement.x - scenario.users[:, 0]
    dy = placement.y - scenario.users[:, 1]
    d_sq = dx * dx + dy * dy + h * h
    d = np.sqrt(d_sq)
    cos_inc = h / d
    m = opt.lambertian_order
    gains = np.where(
        cos_inc >= math.cos(opt.fov_rad),
        opt.gain_factor * cos_inc ** (m + 1.0) / d_sq,
        0.0,
    )
    order = np.argsort(gains, kind="stable")
    return ChannelState(gains, d, order, gains / scenario.noise_power)


def spectral_efficiencies(channel: ChannelState, power: np.ndarray, noise_power: float) -> np.ndarray:
    """Per-user log2(1 + SINR), indexed by original user id.

    Each receiver is interfered only by users later in the decode order
    (stronger channels), scaled by the receiver's own gain.
    """
    order = channel.decode_order
    g = channel.gains[order]
    p = np.asarray(power, dtype=float)[order]
    tail = np.cumsum(p[::-1])[::-1] - p      # sum of powers of stronger users
    sinr = g * p / (noise_power + g * tail)
    se = np.empty_like(sinr)
    se[order] = np.log2(1.0 + sinr)
    return se


def noma_rates(channel: ChannelState, power: np.ndarray, scenario: Scenario) -> np.ndarray:
    """Achievable per-user rates in bit/s (spectral efficiency times bandwidth)."""
    return scenario.bandwidth * spectral_efficiencies(channel, power, scenario.noise_power)


def constraint_residuals(
    placement: Placement,
    power: np.ndarray,
    scenario: Scenario,
    channel: ChannelState | None = None,
) -> np.ndarray:
    """All constraint residuals, negative or zero when satisfied.

    Order: [power budget, optical intensity, SIC gaps (N-1, decode order),
    QoS (N, user id order, spectral-efficiency units), disc placement,
    non-negativity (N, user id order)].
    """
    if channel is None:
        channel = channel_state(placement, scenario)
    p = np.asarray(power, dtype=float)
    n = p.size

    budget = p.sum() - scenario.p_max
    optical = np.sqrt(np.clip(p, 0.0, None)).sum() - scenario.optical_budget

    order = channel.decode_order
    p_ord = p[order]
    hb_ord = channel.normalized_gains[order]
    tail = np.cumsum(p_ord[::-1])[::-1] - p_ord
    # gap for decode slot i is referenced to the next-stronger user's gain
    sic = scenario.theta - (p_ord[:-1] - tail[:-1]) * hb_ord[1:]

    se = spectral_efficiencies(channel, p, scenario.noise_power)
    qos = scenario.rate_min / scenario.bandwidth - se

    disc = placement.radius_sq() - scenario.disc_radius**2
    nonneg = -p

    return np.concatenate((
        np.array([budget, optical]), sic, qos, np.array([disc]), nonneg,
    ))


def residual_scales(scenario: Scenario, channel: ChannelState) -> np.ndarray:
    """Natural magnitude of each residual, for relative feasibility tolerances."""
    n = scenario.n_users
    order = channel.decode_order
    hb_next = channel.normalized_gains[order][1:]
    sic_scale = np.maximum(scenario.theta, scenario.p_max * hb_next)
    qos_scale = np.full(n, max(scenario.rate_min / scenario.bandwidth, 1.0))
    return np.concatenate((
        np.array([scenario.p_max, scenario.optical_budget]),
        sic_scale,
        qos_scale,
        np.array([scenario.disc_radius**2]),
        np.full(n, scenario.p_max),
    ))


def is_feasible(
    residuals: np.ndarray,
    scenario: Scenario,
    channel: ChannelState,
    tolerance: float = 1e-9,
) -> bool:
    """True when every residual is within tolerance of its natural scale."""
    return bool(np.all(residuals <= tolerance * residual_scales(scenario, channel)))
