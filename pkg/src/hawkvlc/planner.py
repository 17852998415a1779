"""Joint transmitter placement and NOMA power allocation by penalized HHO.

The decision vector is [x_u, y_u, p_1, ..., p_N]: coordinates bounded by
[-R, R] per axis (the disc itself is enforced through its penalty term)
and powers by [0, P_max]. Constraint violations enter the fitness as
quadratic penalties with large multiplicative factors, so any feasible
point outranks any meaningfully infeasible one. The fitness works in
spectral-efficiency units (bandwidth 1); reported rates are scaled by the
scenario bandwidth.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import hho, vlc

FEASIBILITY_TOL = 1e-9
DEFAULT_PENALTY_FACTOR = 1e14


@dataclass(frozen=True)
class HhoParams:
    population_size: int = 30
    max_iterations: int = 350


@dataclass(frozen=True)
class PenaltyConfig:
    """Positive penalty factors, one per penalized constraint (2N+2 of them)."""

    factors: np.ndarray

    def __post_init__(self):
        factors = np.asarray(self.factors, dtype=float)
        if factors.ndim != 1 or factors.size < 1 or not np.all(factors > 0):
            raise ValueError("penalty factors must be a 1-d vector of positive reals")
        object.__setattr__(self, "factors", factors)

    @classmethod
    def default(cls, n_users: int, factor: float = DEFAULT_PENALTY_FACTOR) -> "PenaltyConfig":
        return cls(np.full(2 * n_users + 2, factor))


@dataclass
class Solution:
    """Decoded best point with achieved rates and constraint bookkeeping."""

    scheme: str
    placement: vlc.Placement
    power: np.ndarray                 # W, indexed by original user id
    per_user_rates: np.ndarray        # bit/s
    sum_rate: float                   # bit/s
    residuals: np.ndarray             # full residual vector (3N+2 entries)
    feasible: bool
    fitness: float                    # spectral-efficiency objective value
    seed: object = None
    trace: np.ndarray | None = None   # best fitness per iteration, not serialized

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme,
            "placement": [self.placement.x, self.placement.y],
            "power_w": [float(p) for p in self.power],
            "per_user_rates_bps": [float(r) for r in self.per_user_rates],
            "sum_rate_bps": float(self.sum_rate),
            "residuals": [float(g) for g in self.residuals],
            "feasible": bool(self.feasible),
            "fitness": float(self.fitness),
            "seed": self.seed if self.seed is None else int(self.seed),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def decision_bounds(scenario: vlc.Scenario) -> hho.SearchSpace:
    """Search box for the (2 + N)-dimensional decision vector."""
    r = scenario.disc_radius
    lower = np.concatenate((np.array([-r, -r]), np.zeros(scenario.n_users)))
    upper = np.concatenate((np.array([r, r]), np.full(scenario.n_users, scenario.p_max)))
    return hho.SearchSpace(lower, upper)


def decode(x: np.ndarray) -> tuple[vlc.Placement, np.ndarray]:
    """Split a decision vector into placement and per-user powers."""
    return vlc.Placement(float(x[0]), float(x[1])), np.asarray(x[2:], dtype=float)


class _FitnessContext:
    """Precomputed scenario constants for fast repeated fitness evaluation."""

    def __init__(self, scenario: vlc.Scenario, penalty: PenaltyConfig):
        n = scenario.n_users
        if penalty.factors.size != 2 * n + 2:
            raise ValueError(f"expected {2 * n + 2} penalty factors, got {penalty.factors.size}")
        opt = scenario.optics
        self.ux = scenario.users[:, 0].copy()
        self.uy = scenario.users[:, 1].copy()
        self.h_sq = scenario.altitude**2
        self.altitude = scenario.altitude
        self.m = opt.lambertian_order
        self.zeta = opt.gain_factor
        self.cos_fov = math.cos(opt.fov_rad)
        self.noise = scenario.noise_power
        self.theta = scenario.theta
        self.se_floor = scenario.rate_min / scenario.bandwidth
        self.p_max = scenario.p_max
        self.optical_budget = scenario.optical_budget
        self.radius_sq = scenario.disc_radius**2
        self.mu_budget = penalty.factors[0]
        self.mu_optical = penalty.factors[1]
        self.mu_sic = penalty.factors[2 : n + 1]
        self.mu_qos = penalty.factors[n + 1 : 2 * n + 1]
        self.mu_disc = penalty.factors[2 * n + 1]

    def gains_and_order(self, x0: float, x1: float) -> tuple[np.ndarray, np.ndarray]:
        dx = x0 - self.ux
        dy = x1 - self.uy
        d_sq = dx * dx + dy * dy + self.h_sq
        cos_inc = self.altitude / np.sqrt(d_sq)
        gains = np.where(
            cos_inc >= self.cos_fov,
            self.zeta * cos_inc ** (self.m + 1.0) / d_sq,
            0.0,
        )
        return gains, np.argsort(gains, kind="stable")

    def evaluate_power(
        self, x0: float, x1: float, gains: np.ndarray, order: np.ndarray, p: np.ndarray
    ) -> float:
        g_ord = gains[order]
        p_ord = p[order]
        tail = np.cumsum(p_ord[::-1])[::-1] - p_ord
        se_ord = np.log2(1.0 + g_ord * p_ord / (self.noise + g_ord * tail))

        objective = se_ord.sum()

        hb_next = g_ord[1:] / self.noise
        sic = self.theta - (p_ord[:-1] - tail[:-1]) * hb_next
        qos = self.se_floor - se_ord
        budget = p.sum() - self.p_max
        optical = np.sqrt(p).sum() - self.optical_budget
        disc = x0 * x0 + x1 * x1 - self.radius_sq

        penalty = 0.0
        if budget > 0.0:
            penalty += self.mu_budget * budget * budget
        if optical > 0.0:
            penalty += self.mu_optical * optical * optical
        if disc > 0.0:
            penalty += self.mu_disc * disc * disc
        penalty += np.sum(self.mu_sic * np.square(np.maximum(sic, 0.0)))
        penalty += np.sum(self.mu_qos * np.square(np.maximum(qos, 0.0)))
        return float(objective - penalty)

    def evaluate(self, x: np.ndarray) -> float:
        gains, order = self.gains_and_order(x[0], x[1])
        return self.evaluate_power(x[0], x[1], gains, order, x[2:])


def fitness(x: np.ndarray, scenario: vlc.Scenario, penalty: PenaltyConfig | None = None) -> float:
    """Penalized objective of one decision vector (assumed inside the box).

    Equals the sum of spectral efficiencies exactly when every constraint
    holds; each violated constraint subtracts factor * residual^2. SIC and
    QoS penalty terms are indexed by decode slot of the candidate placement.
    """
    if penalty is None:
        penalty = PenaltyConfig.default(scenario.n_users)
    return _FitnessContext(scenario, penalty).evaluate(np.asarray(x, dtype=float))


def make_fitness(scenario: vlc.Scenario, penalty: PenaltyConfig | None = None):
    """Fast closure over precomputed scenario constants, for optimizer loops."""
    if penalty is None:
        penalty = PenaltyConfig.default(scenario.n_users)
    return _FitnessContext(scenario, penalty).evaluate


def build_solution(
    scheme: str,
    x: np.ndarray,
    scenario: vlc.Scenario,
    fitness_value: float,
    seed=None,
    trace: np.ndarray | None = None,
) -> Solution:
    """Decode a decision vector and re-derive rates, residuals and feasibility."""
    placement, power = decode(x)
    channel = vlc.channel_state(placement, scenario)
    rates = vlc.noma_rates(channel, power, scenario)
    residuals = vlc.constraint_residuals(placement, power, scenario, channel)
    feasible = vlc.is_feasible(residuals, scenario, channel, FEASIBILITY_TOL)
    return Solution(
        scheme=scheme,
        placement=placement,
        power=power,
        per_user_rates=rates,
        sum_rate=float(rates.sum()),
        residuals=residuals,
        feasible=feasible,
        fitness=fitness_value,
        seed=seed,
        trace=trace,
    )


def solve(
    scenario: vlc.Scenario,
    hho_params: HhoParams = HhoParams(),
    seed=None,
    penalty: PenaltyConfig | None = None,
) -> Solution:
    """Optimize placement and power jointly; never silently claims feasibility.

    The returned solution carries the feasibility flag from an independent
    residual re-evaluation of the decoded point, plus the per-iteration
    best-fitness trace.
    """
    space = decision_bounds(scenario)
    fitness_fn = make_fitness(scenario, penalty)
    best_x, best_f, trace = hho.optimize(
        space,
        fitness_fn,
        population_size=hho_params.population_size,
        max_iterations=hho_params.max_iterations,
        seed=seed,
    )
    return build_solution("hhopap", best_x, scenario, best_f, seed=seed, trace=trace)
