"""Harris hawks optimization over box-bounded real vectors.

Population-based metaheuristic mimicking cooperative hawk hunting: an
exploration phase driven by random perching, and four exploitation
tactics (soft/hard besiege, each with an optional pair of rapid dives
guided by Levy flights) selected by the prey's decaying escaping energy.

This implementation maximizes the fitness function; minimization users
negate their objective. All candidate positions are clamped into the
search box after every update, and non-finite fitness values are treated
as negative infinity so they can never become the prey.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, NamedTuple

import numpy as np

FitnessFn = Callable[[np.ndarray], float]


@dataclass(frozen=True)
class SearchSpace:
    """Box-bounded search domain with per-component lower/upper limits."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lower.shape != upper.shape or lower.ndim != 1:
            raise ValueError("lower and upper bounds must be 1-d and equally sized")
        if lower.size < 1:
            raise ValueError("search space needs at least one dimension")
        if not np.all(lower < upper):
            raise ValueError("every lower bound must be strictly below its upper bound")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self) -> int:
        return self.lower.size

    def clamp(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lower, self.upper)

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        return self.lower + rng.random((count, self.dim)) * (self.upper - self.lower)


@dataclass
class Hawk:
    """One candidate solution: a position vector and its fitness."""

    position: np.ndarray
    fitness: float = float("-inf")


@dataclass
class HhoState:
    """Evolving optimizer state: the population, best-so-far prey, and clock."""

    population: list[Hawk]
    prey: Hawk
    iteration: int
    max_iterations: int
    rng_seed: object = None


@dataclass(frozen=True)
class EnergySample:
    """Per-update random draws controlling phase selection.

    ``e`` decays linearly with the iteration clock: e = 2*e0*(1 - t/T),
    and ``jump`` = 2*(1 - r5) always lies in [0, 2].
    """

    e0: float
    e: float
    jump: float
    q: float
    r: float


class Phase(Enum):
    PERCH = "explore_perch"
    SPREAD = "explore_spread"
    SOFT = "soft_besiege"
    HARD = "hard_besiege"
    SOFT_DIVE = "soft_besiege_dive"
    HARD_DIVE = "hard_besiege_dive"


class HhoResult(NamedTuple):
    best_position: np.ndarray
    best_fitness: float
    trace: np.ndarray


def escaping_energy(e0: float, t: int, max_t: int) -> float:
    """Escaping energy of the prey at iteration t of max_t: 2*e0*(1 - t/max_t)."""
    if max_t < 1:
        raise ValueError("max_t must be at least 1")
    return 2.0 * e0 * (1.0 - t / max_t)


def average_position(population) -> np.ndarray:
    """Componentwise mean position of the population (hawks or raw vectors)."""
    if len(population) == 0:
        raise ValueError("population must be non-empty")
    if isinstance(population[0], Hawk):
        return np.mean([h.position for h in population], axis=0)
    return np.mean(np.asarray(population, dtype=float), axis=0)


def explore_step(
    hawk: Hawk,
    random_hawk: Hawk,
    avg_position: np.ndarray,
    prey: Hawk,
    space: SearchSpace,
    q: float,
    r1: float,
    r2: float,
    r3: float,
    r4: float,
) -> np.ndarray:
    """Exploration update.

    q >= 0.5 perches relative to a random family member:
        X_r - r1*|X_r - 2*r2*X|
    q < 0.5 perches relative to the prey and the population average:
        (X_p - X_a) - r3*(LB + r4*(UB - LB))
    """
    x = np.asarray(hawk.position, dtype=float)
    if x.size != space.dim:
        raise ValueError("position length does not match search space dimension")
    if q >= 0.5:
        xr = np.asarray(random_hawk.position, dtype=float)
        new = xr - r1 * np.abs(xr - 2.0 * r2 * x)
    else:
        new = (prey.position - avg_position) - r3 * (
            space.lower + r4 * (space.upper - space.lower)
        )
    return space.clamp(new)


def soft_besiege(hawk: Hawk, prey: Hawk, space: SearchSpace, e: float, jump: float) -> np.ndarray:
    """Soft encirclement: (X_p - X) - e*|J*X_p - X|, clamped to bounds."""
    delta = prey.position - hawk.position
    new = delta - e * np.abs(jump * prey.position - hawk.position)
    return space.clamp(new)


def hard_besiege(hawk: Hawk, prey: Hawk, space: SearchSpace, e: float) -> np.ndarray:
    """Hard encirclement: X_p - e*|X_p - X|, clamped to bounds."""
    new = prey.position - e * np.abs(prey.position - hawk.position)
    return space.clamp(new)


def levy_sigma(beta: float) -> float:
    """Scale factor of the Levy step-length distribution for exponent beta."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    num = math.gamma(1.0 + beta) * math.sin(math.pi * beta / 2.0)
    den = math.gamma((1.0 + beta) / 2.0) * beta * 2.0 ** ((beta - 1.0) / 2.0)
    return (num / den) ** (1.0 / beta)


def levy_flight(dim: int, beta: float, rng: np.random.Generator) -> np.ndarray:
    """Vector of heavy-tailed step lengths 0.01*u*sigma/|v|^(1/beta).

    u and v are fresh standard-normal draws per component (u first, then v),
    giving two-sided heavy-tailed steps.
    """
    u = rng.standard_normal(dim)
    v = rng.standard_normal(dim)
    return 0.01 * u * levy_sigma(beta) / np.abs(v) ** (1.0 / beta)


def progressive_dive(
    hawk: Hawk,
    prey: Hawk,
    avg_position: np.ndarray,
    space: SearchSpace,
    e: float,
    jump: float,
    mode: str,
    fitness_fn: FitnessFn,
    rng: np.random.Generator,
    beta: float = 1.5,
) -> tuple[np.ndarray, float]:
    """Besiege with progressive rapid dives; greedy pick among Y, Z, X.

    Soft mode aims the first dive relative to the hawk itself,
        Y = X_p - e*|J*X_p - X|,
    hard mode relative to the population average,
        Y = X_p - e*|J*X_p - X_a|.
    The second dive perturbs Y with a Levy flight, Z = Y + S*LF(D) with S
    uniform on [0, 1]. Returns (position, fitness) of Y if it improves on
    the hawk, else Z if it improves, else the hawk unchanged.
    """
    if mode == "soft":
        anchor = hawk.position
    elif mode == "hard":
        anchor = avg_position
    else:
        raise ValueError(f"unknown dive mode {mode!r}")

    y = space.clamp(prey.position - e * np.abs(jump * prey.position - anchor))
    fy = _safe_fitness(fitness_fn, y)
    if fy > hawk.fitness:
        return y, fy

    scale = rng.random(space.dim)
    z = space.clamp(y + scale * levy_flight(space.dim, beta, rng))
    fz = _safe_fitness(fitness_fn, z)
    if fz > hawk.fitness:
        return z, fz
    return hawk.position, hawk.fitness


def select_phase(e: float, q: float, r: float) -> Phase:
    """Map the (energy, q, r) draws onto exactly one update rule."""
    if abs(e) >= 1.0:
        return Phase.PERCH if q >= 0.5 else Phase.SPREAD
    if r >= 0.5:
        return Phase.SOFT if abs(e) >= 0.5 else Phase.HARD
    return Phase.SOFT_DIVE if abs(e) >= 0.5 else Phase.HARD_DIVE


def _safe_fitness(fitness_fn: FitnessFn, x: np.ndarray) -> float:
    value = float(fitness_fn(x))
    return value if math.isfinite(value) else float("-inf")


def _draw_energy(rng: np.random.Generator, t: int, max_t: int) -> EnergySample:
    e0 = 2.0 * rng.random() - 1.0
    jump = 2.0 * (1.0 - rng.random())
    q = rng.random()
    r = rng.random()
    return EnergySample(e0=e0, e=escaping_energy(e0, t, max_t), jump=jump, q=q, r=r)


def optimize(
    space: SearchSpace,
    fitness_fn: FitnessFn,
    population_size: int,
    max_iterations: int,
    seed=None,
    iteration_hook=None,
) -> HhoResult:
    """Run the full hawk optimization loop and return the best solution found.

    The initial population is evaluated before the loop so the prey is
    defined at iteration 0; each subsequent iteration updates every hawk
    (one phase per hawk, chosen by its own energy/probability draws),
    re-evaluates, and records the best-so-far fitness in the trace. Each
    hawk consumes an independent random stream split from ``seed``, so
    results do not depend on evaluation order.

    ``iteration_hook(t, iteration_best, best_so_far)`` is called after each
    iteration; returning True stops the loop early (used by trainers for
    tolerance-based stopping).
    """
    if population_size < 2:
        raise ValueError("population_size must be at least 2")
    if max_iterations < 1:
        raise ValueError("max_iterations must be at least 1")

    master = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    streams = master.spawn(population_size + 1)
    init_rng = np.random.default_rng(streams[0])
    hawk_rngs = [np.random.default_rng(s) for s in streams[1:]]

    positions = space.sample(init_rng, population_size)
    population = [Hawk(p, _safe_fitness(fitness_fn, p)) for p in positions]
    prey = max(population, key=lambda h: h.fitness)
    prey = Hawk(prey.position.copy(), prey.fitness)
    state = HhoState(population, prey, 0, max_iterations, rng_seed=seed)
    if iteration_hook is not None:
        iteration_hook(0, state.prey.fitness, state.prey.fitness)

    trace = []
    for t in range(1, max_iterations + 1):
        state.iteration = t
        snapshot = [Hawk(h.position, h.fitness) for h in population]
        avg = average_position([h.position for h in snapshot])

        for i, rng in enumerate(hawk_rngs):
            hawk = population[i]
            sample = _draw_energy(rng, t, max_iterations)
            phase = select_phase(sample.e, sample.q, sample.r)

            if phase in (Phase.PERCH, Phase.SPREAD):
                mate = snapshot[rng.integers(population_size)]
                r1, r2, r3, r4 = rng.random(4)
                hawk.position = explore_step(
                    snapshot[i], mate, avg, state.prey, space, sample.q, r1, r2, r3, r4
                )
                hawk.fitness = None
            elif phase is Phase.SOFT:
                hawk.position = soft_besiege(snapshot[i], state.prey, space, sample.e, sample.jump)
                hawk.fitness = None
            elif phase is Phase.HARD:
                hawk.position = hard_besiege(snapshot[i], state.prey, space, sample.e)
                hawk.fitness = None
            else:
                mode = "soft" if phase is Phase.SOFT_DIVE else "hard"
                hawk.position, hawk.fitness = progressive_dive(
                    snapshot[i], state.prey, avg, space, sample.e, sample.jump,
                    mode, fitness_fn, rng,
                )

        # best among this iteration's fresh evaluations (dive fall-throughs
        # keep their old value and are excluded, so the quantity is stochastic)
        fresh_best = float("-inf")
        for i, hawk in enumerate(population):
            if hawk.fitness is None:
                hawk.fitness = _safe_fitness(fitness_fn, hawk.position)
            if hawk.position is not snapshot[i].position:
                fresh_best = max(fresh_best, hawk.fitness)

        best = max(population, key=lambda h: h.fitness)
        if best.fitness > state.prey.fitness:
            state.prey = Hawk(best.position.copy(), best.fitness)
        trace.append(state.prey.fitness)

        if fresh_best == float("-inf"):
            fresh_best = state.prey.fitness
        if iteration_hook is not None and iteration_hook(t, fresh_best, state.prey.fitness):
            break

    return HhoResult(state.prey.position.copy(), state.prey.fitness, np.asarray(trace))
