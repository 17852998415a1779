"""Comparison schemes: ratio-ladder power allocation, random placement, OFDMA.

Each baseline reuses the hawk optimizer with the same population budget as
the joint solver, differing only in which variables it optimizes:

* grpa: power fixed by a geometric gain-ratio ladder (weakest user gets the
  largest share), placement optimized.
* randp: placement drawn uniformly over the allowed disc, power optimized.
* ofdma: orthogonal subbands (equal bandwidth split, subband-scaled noise),
  placement and power optimized jointly, no SIC gap constraints.
"""

from __future__ import annotations

import math
from enum import Enum

import numpy as np

from . import hho, vlc
from .planner import (
    FEASIBILITY_TOL,
    HhoParams,
    PenaltyConfig,
    Solution,
    _FitnessContext,
    build_solution,
    decision_bounds,
)

DEFAULT_GRPA_ALPHA = 0.4


class BaselineKind(Enum):
    GRPA = "grpa"
    RANDP = "randp"
    OFDMA = "ofdma"


def grpa_allocate(channel: vlc.ChannelState, scenario: vlc.Scenario, alpha: float = DEFAULT_GRPA_ALPHA) -> np.ndarray:
    """Geometric power ladder over the decode order, normalized to P_max.

    Shares are proportional to {1, alpha, alpha^2, ...} assigned weakest to
    strongest, so allocation is non-increasing along the decode order.
    Returns powers indexed by original user id.
    """
    n = scenario.n_users
    shares = alpha ** np.arange(n, dtype=float)
    shares *= scenario.p_max / shares.sum()
    power = np.empty(n)
    power[channel.decode_order] = shares
    return power


def grpa_solve(
    scenario: vlc.Scenario,
    hho_params: HhoParams = HhoParams(),
    seed=None,
    alpha: float = DEFAULT_GRPA_ALPHA,
    penalty: PenaltyConfig | None = None,
) -> Solution:
    """Optimize placement only; power follows the ladder at every candidate."""
    if penalty is None:
        penalty = PenaltyConfig.default(scenario.n_users)
    ctx = _FitnessContext(scenario, penalty)
    n = scenario.n_users
    shares = alpha ** np.arange(n, dtype=float)
    shares *= scenario.p_max / shares.sum()

    def fitness_fn(w):
        gains, order = ctx.gains_and_order(w[0], w[1])
        power = np.empty(n)
        power[order] = shares
        return ctx.evaluate_power(w[0], w[1], gains, order, power)

    r = scenario.disc_radius
    space = hho.SearchSpace(np.array([-r, -r]), np.array([r, r]))
    best_w, best_f, trace = hho.optimize(
        space, fitness_fn, hho_params.population_size, hho_params.max_iterations, seed=seed
    )
    channel = vlc.channel_state(vlc.Placement(best_w[0], best_w[1]), scenario)
    power = np.empty(n)
    power[channel.decode_order] = shares
    x = np.concatenate((best_w, power))
    return build_solution("grpa", x, scenario, best_f, seed=seed, trace=trace)


def sample_disc_placement(rng: np.random.Generator, radius: float) -> vlc.Placement:
    """Area-uniform point on the disc: radius R*sqrt(u), angle 2*pi*v."""
    r = radius * math.sqrt(rng.random())
    angle = 2.0 * math.pi * rng.random()
    return vlc.Placement(r * math.cos(angle), r * math.sin(angle))


def randp_solve(
    scenario: vlc.Scenario,
    hho_params: HhoParams = HhoParams(),
    seed=None,
    penalty: PenaltyConfig | None = None,
) -> Solution:
    """Random placement inside the disc; optimize the power vector only."""
    if penalty is None:
        penalty = PenaltyConfig.default(scenario.n_users)
    master = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    place_ss, opt_ss = master.spawn(2)
    placement = sample_disc_placement(np.random.default_rng(place_ss), scenario.disc_radius)

    ctx = _FitnessContext(scenario, penalty)
    gains, order = ctx.gains_and_order(placement.x, placement.y)

    def fitness_fn(p):
        return ctx.evaluate_power(placement.x, placement.y, gains, order, p)

    n = scenario.n_users
    space = hho.SearchSpace(np.zeros(n), np.full(n, scenario.p_max))
    best_p, best_f, trace = hho.optimize(
        space, fitness_fn, hho_params.population_size, hho_params.max_iterations, seed=opt_ss
    )
    x = np.concatenate((np.array([placement.x, placement.y]), best_p))
    return build_solution("randp", x, scenario, best_f, seed=seed, trace=trace)


def ofdma_spectral_efficiencies(channel: vlc.ChannelState, power: np.ndarray, scenario: vlc.Scenario) -> np.ndarray:
    """Full-band-normalized efficiencies with 1/N bandwidth and 1/N noise each."""
    n = scenario.n_users
    p = np.asarray(power, dtype=float)
    return np.log2(1.0 + channel.gains * p * n / scenario.noise_power) / n


def ofdma_rates(channel: vlc.ChannelState, power: np.ndarray, scenario: vlc.Scenario) -> np.ndarray:
    return scenario.bandwidth * ofdma_spectral_efficiencies(channel, power, scenario)


def ofdma_residuals(
    placement: vlc.Placement,
    power: np.ndarray,
    scenario: vlc.Scenario,
    channel: vlc.ChannelState | None = None,
) -> np.ndarray:
    """Residuals of the OFDMA constraint set (no SIC gaps).

    Order: [power budget, optical intensity, QoS (N), disc, non-negativity (N)].
    """
    if channel is None:
        channel = vlc.channel_state(placement, scenario)
    p = np.asarray(power, dtype=float)
    budget = p.sum() - scenario.p_max
    optical = np.sqrt(np.clip(p, 0.0, None)).sum() - scenario.optical_budget
    qos = scenario.rate_min / scenario.bandwidth - ofdma_spectral_efficiencies(channel, p, scenario)
    disc = placement.radius_sq() - scenario.disc_radius**2
    return np.concatenate((np.array([budget, optical]), qos, np.array([disc]), -p))


def _ofdma_feasible(residuals: np.ndarray, scenario: vlc.Scenario) -> bool:
    n = scenario.n_users
    scales = np.concatenate((
        np.array([scenario.p_max, scenario.optical_budget]),
        np.full(n, max(scenario.rate_min / scenario.bandwidth, 1.0)),
        np.array([scenario.disc_radius**2]),
        np.full(n, scenario.p_max),
    ))
    return bool(np.all(residuals <= FEASIBILITY_TOL * scales))


def ofdma_solve(
    scenario: vlc.Scenario,
    hho_params: HhoParams = HhoParams(),
    seed=None,
    penalty: PenaltyConfig | None = None,
) -> Solution:
    """Jointly optimize placement and power under the orthogonal-access rates."""
    if penalty is None:
        penalty = PenaltyConfig.default(scenario.n_users)
    ctx = _FitnessContext(scenario, penalty)
    n = scenario.n_users
    se_floor = scenario.rate_min / scenario.bandwidth

    def fitness_fn(x):
        p = x[2:]
        gains, _ = ctx.gains_and_order(x[0], x[1])
        se = np.log2(1.0 + gains * p * n / ctx.noise) / n
        objective = se.sum()
        budget = p.sum() - ctx.p_max
        optical = np.sqrt(p).sum() - ctx.optical_budget
        disc = x[0] * x[0] + x[1] * x[1] - ctx.radius_sq
        pen = 0.0
        if budget > 0.0:
            pen += ctx.mu_budget * budget * budget
        if optical > 0.0:
            pen += ctx.mu_optical * optical * optical
        if disc > 0.0:
            pen += ctx.mu_disc * disc * disc
        pen += np.sum(ctx.mu_qos * np.square(np.maximum(se_floor - se, 0.0)))
        return float(objective - pen)

    space = decision_bounds(scenario)
    best_x, best_f, trace = hho.optimize(
        space, fitness_fn, hho_params.population_size, hho_params.max_iterations, seed=seed
    )
    placement = vlc.Placement(float(best_x[0]), float(best_x[1]))
    power = np.asarray(best_x[2:], dtype=float)
    channel = vlc.channel_state(placement, scenario)
    rates = ofdma_rates(channel, power, scenario)
    residuals = ofdma_residuals(placement, power, scenario, channel)
    return Solution(
        scheme="ofdma",
        placement=placement,
        power=power,
        per_user_rates=rates,
        sum_rate=float(rates.sum()),
        residuals=residuals,
        feasible=_ofdma_feasible(residuals, scenario),
        fitness=best_f,
        seed=seed,
        trace=trace,
    )


def solve_baseline(
    kind: BaselineKind,
    scenario: vlc.Scenario,
    hho_params: HhoParams = HhoParams(),
    seed=None,
) -> Solution:
    if kind is BaselineKind.GRPA:
        return grpa_solve(scenario, hho_params, seed)
    if kind is BaselineKind.RANDP:
        return randp_solve(scenario, hho_params, seed)
    if kind is BaselineKind.OFDMA:
        return ofdma_solve(scenario, hho_params, seed)
    raise ValueError(f"unknown baseline {kind!r}")
