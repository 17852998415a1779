"""Single-hidden-layer network trained by population metaheuristics.

The network maps standardized user locations to a normalized placement and
power allocation; all weights and biases live in one flat genome vector so
any box-bounded optimizer (hawks, particle swarm, evolution strategy,
genetic algorithm) can train it. A generic dataset-MSE mode trains the same
genome on labeled CSV data instead.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import hho, vlc

ACTIVATIONS = ("unipolar_sigmoid", "bipolar_sigmoid", "tanh", "relu")


@dataclass(frozen=True)
class FnnTopology:
    """Layer sizes and hidden activation; the output layer is always linear."""

    inputs: int
    hidden: int
    outputs: int
    activation: str = "unipolar_sigmoid"

    def __post_init__(self):
        if min(self.inputs, self.hidden, self.outputs) < 1:
            raise ValueError("all layer sizes must be positive")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"activation must be one of {ACTIVATIONS}")

    @property
    def genome_length(self) -> int:
        return (
            self.inputs * self.hidden
            + self.hidden * self.outputs
            + self.hidden
            + self.outputs
        )

    @classmethod
    def for_scenario(cls, n_users: int, activation: str = "unipolar_sigmoid") -> "FnnTopology":
        """Planner-replacement shape: 2N location inputs, N+2 hidden and output nodes."""
        return cls(inputs=2 * n_users, hidden=n_users + 2, outputs=n_users + 2, activation=activation)


@dataclass(frozen=True)
class FnnModel:
    """A topology plus its trained flat weight vector."""

    topology: FnnTopology
    genome: np.ndarray

    def __post_init__(self):
        genome = np.asarray(self.genome, dtype=float)
        if genome.shape != (self.topology.genome_length,):
            raise ValueError("genome length does not match topology")
        object.__setattr__(self, "genome", genome)

    def to_json(self) -> str:
        t = self.topology
        return json.dumps(
            {
                "inputs": t.inputs,
                "hidden": t.hidden,
                "outputs": t.outputs,
                "activation": t.activation,
                "genome": [float(w) for w in self.genome],
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "FnnModel":
        raw = json.loads(text)
        topology = FnnTopology(raw["inputs"], raw["hidden"], raw["outputs"], raw["activation"])
        return cls(topology, np.asarray(raw["genome"], dtype=float))

    def save(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n")

    @classmethod
    def load(cls, path) -> "FnnModel":
        return cls.from_json(Path(path).read_text())


def split_genome(genome: np.ndarray, topology: FnnTopology):
    """Unpack the flat vector into (W_in, W_out, b_hidden, b_out), row-major."""
    i, h, o = topology.inputs, topology.hidden, topology.outputs
    genome = np.asarray(genome, dtype=float)
    if genome.size != topology.genome_length:
        raise ValueError("genome length does not match topology")
    w_in = genome[: i * h].reshape(i, h)
    w_out = genome[i * h : i * h + h * o].reshape(h, o)
    b_hidden = genome[i * h + h * o : i * h + h * o + h]
    b_out = genome[i * h + h * o + h :]
    return w_in, w_out, b_hidden, b_out


def join_genome(w_in, w_out, b_hidden, b_out) -> np.ndarray:
    return np.concatenate(
        (np.ravel(w_in), np.ravel(w_out), np.ravel(b_hidden), np.ravel(b_out))
    )


def _activate(kind: str, s: np.ndarray) -> np.ndarray:
    s = np.clip(s, -500.0, 500.0)
    if kind == "unipolar_sigmoid":
        return 1.0 / (1.0 + np.exp(-s))
    if kind == "bipolar_sigmoid":
        return np.tanh(s / 2.0)
    if kind == "tanh":
        return np.tanh(s)
    return np.maximum(s, 0.0)


def forward(genome: np.ndarray, topology: FnnTopology, inputs: np.ndarray) -> np.ndarray:
    """One forward pass: activated hidden layer, linear output layer."""
    x = np.asarray(inputs, dtype=float)
    if x.shape != (topology.inputs,):
        raise ValueError(f"expected input of length {topology.inputs}, got shape {x.shape}")
    w_in, w_out, b_hidden, b_out = split_genome(genome, topology)
    z = _activate(topology.activation, x @ w_in + b_hidden)
    return z @ w_out + b_out


def forward_batch(genome: np.ndarray, topology: FnnTopology, inputs: np.ndarray) -> np.ndarray:
    """Forward pass over an (S, inputs) sample matrix."""
    w_in, w_out, b_hidden, b_out = split_genome(genome, topology)
    z = _activate(topology.activation, inputs @ w_in + b_hidden)
    return z @ w_out + b_out


def normalize_locations(scenario: vlc.Scenario) -> np.ndarray:
    """Standardized user coordinates, interleaved [x1, y1, x2, y2, ...].

    Each coordinate is z-scored over the users of the realization
    (population standard deviation); a degenerate coordinate maps to zeros.
    """
    users = scenario.users
    mean = users.mean(axis=0)
    std = users.std(axis=0)
    safe = np.where(std > 0.0, std, 1.0)
    normalized = np.where(std > 0.0, (users - mean) / safe, 0.0)
    return normalized.ravel()


def decode_outputs(raw: np.ndarray, scenario: vlc.Scenario) -> tuple[vlc.Placement, np.ndarray]:
    """Clamp and scale raw network outputs to a usable placement and powers.

    Placement components are clamped to [-1, 1] and scaled by the disc
    radius, then radially projected onto the disc; powers are clamped to
    [0, 1] and scaled by the power budget.
    """
    raw = np.asarray(raw, dtype=float)
    r = scenario.disc_radius
    w = np.clip(raw[:2], -1.0, 1.0) * r
    norm = math.hypot(w[0], w[1])
    if norm > r:
        w *= r / norm
    power = np.clip(raw[2:], 0.0, 1.0) * scenario.p_max
    return vlc.Placement(float(w[0]), float(w[1])), power


def network_solution(genome: np.ndarray, topology: FnnTopology, scenario: vlc.Scenario):
    """Decoded placement/power the network proposes for one realization."""
    raw = forward(genome, topology, normalize_locations(scenario))
    return decode_outputs(raw, scenario)


def network_sum_efficiency(genome: np.ndarray, topology: FnnTopology, scenario: vlc.Scenario) -> float:
    placement, power = network_solution(genome, topology, scenario)
    channel = vlc.channel_state(placement, scenario)
    return float(vlc.spectral_efficiencies(channel, power, scenario.noise_power).sum())


def sum_rate_loss(genome: np.ndarray, topology: FnnTopology, scenario: vlc.Scenario) -> float:
    """Negated sum of spectral efficiencies of the decoded network solution."""
    return -network_sum_efficiency(genome, topology, scenario)


def match_loss(
    genome: np.ndarray, topology: FnnTopology, scenario: vlc.Scenario, reference_sum: float
) -> float:
    """Squared gap between a reference sum efficiency and the network's."""
    gap = reference_sum - network_sum_efficiency(genome, topology, scenario)
    return gap * gap


@dataclass(frozen=True)
class TrainingSet:
    """Either labeled samples (dataset mode) or scenario realizations (rate modes)."""

    inputs: np.ndarray | None = None
    targets: np.ndarray | None = None
    scenarios: tuple[vlc.Scenario, ...] | None = None
    references: np.ndarray | None = None   # per-scenario reference sum efficiencies

    @classmethod
    def from_dataset(cls, inputs: np.ndarray, targets: np.ndarray) -> "TrainingSet":
        inputs = np.asarray(inputs, dtype=float)
        targets = np.asarray(targets, dtype=float)
        if inputs.ndim != 2 or targets.ndim != 2 or inputs.shape[0] != targets.shape[0]:
            raise ValueError("inputs and targets must be 2-d with matching row counts")
        if inputs.shape[0] == 0:
            raise ValueError("training set must be non-empty")
        return cls(inputs=inputs, targets=targets)

    @classmethod
    def from_scenarios(cls, scenarios, references=None) -> "TrainingSet":
        scenarios = tuple(scenarios)
        if not scenarios:
            raise ValueError("training set must be non-empty")
        if references is not None:
            references = np.asarray(references, dtype=float)
            if references.shape != (len(scenarios),):
                raise ValueError("need one reference value per scenario")
        return cls(scenarios=scenarios, references=references)


@dataclass(frozen=True)
class TrainerConfig:
    algorithm: str = "hho"            # hho | pso | es | ga
    loss: str = "sum_rate"            # sum_rate | match | dataset_mse
    population: int = 30
    stopping_tolerance: float = 1e-12
    max_iterations: int = 200
    weight_bound: float = 10.0

    def __post_init__(self):
        if self.algorithm not in ("hho", "pso", "es", "ga"):
            raise ValueError(f"unknown trainer algorithm {self.algorithm!r}")
        if self.loss not in ("sum_rate", "match", "dataset_mse"):
            raise ValueError(f"unknown loss {self.loss!r}")
        if self.stopping_tolerance <= 0:
            raise ValueError("stopping_tolerance must be positive")


def dataset_mse(genome: np.ndarray, topology: FnnTopology, inputs: np.ndarray, targets: np.ndarray) -> float:
    """Mean squared error averaged over samples and output nodes."""
    predictions = forward_batch(genome, topology, inputs)
    return float(np.mean(np.square(predictions - targets)))


def make_loss(config: TrainerConfig, topology: FnnTopology, data: TrainingSet):
    """Bind the configured loss to the training data as genome -> float."""
    if config.loss == "dataset_mse":
        if data.inputs is None:
            raise ValueError("dataset_mse training needs labeled samples")
        inputs, targets = data.inputs, data.targets
        return lambda genome: dataset_mse(genome, topology, inputs, targets)

    if data.scenarios is None:
        raise ValueError("rate losses need scenario realizations")
    scenarios = data.scenarios
    if config.loss == "sum_rate":
        def loss(genome):
            total = 0.0
            for scenario in scenarios:
                total += sum_rate_loss(genome, topology, scenario)
            return total / len(scenarios)
        return loss

    if data.references is None:
        raise ValueError("match loss needs per-scenario reference sum efficiencies")
    references = data.references

    def loss(genome):
        total = 0.0
        for scenario, reference in zip(scenarios, references):
            total += match_loss(genome, topology, scenario, reference)
        return total / len(scenarios)
    return loss


# --- population trainers over a shared minimize interface -----------------

class _StopRule:
    """Stop once successive per-iteration best losses differ by < tolerance.

    The first call only records the pre-loop baseline, so training always
    performs at least one iteration. An exactly-zero difference does not
    stop: population methods re-evaluate cloned candidates all the time
    (elites, prey copies, saturated genomes), and an unchanged value carries
    no convergence evidence, unlike a nonzero-but-tiny one.
    """

    def __init__(self, tolerance: float):
        self.tolerance = tolerance
        self.previous: float | None = None

    def update(self, iteration_best: float) -> bool:
        if self.previous is None:
            self.previous = iteration_best
            return False
        diff = abs(iteration_best - self.previous)
        self.previous = iteration_best
        return 0.0 < diff < self.tolerance


def hho_minimize(loss_fn, dim, bound, population, max_iterations, tolerance, seed):
    space = hho.SearchSpace(np.full(dim, -bound), np.full(dim, bound))
    rule = _StopRule(tolerance)
    best_x, best_f, trace = hho.optimize(
        space,
        lambda x: -loss_fn(x),
        population_size=population,
        max_iterations=max_iterations,
        seed=seed,
        iteration_hook=lambda t, iteration_best, _: rule.update(iteration_best),
    )
    return best_x, -np.asarray(trace)


def pso_minimize(
    loss_fn, dim, bound, population, max_iterations, tolerance, seed,
    inertia=0.729, cognitive=1.49445, social=1.49445,
):
    """Global-best particle swarm with velocity clamped to 0.2x the range."""
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    lower, upper = -bound, bound
    vmax = 0.2 * (upper - lower)
    x = rng.uniform(lower, upper, (population, dim))
    v = np.zeros((population, dim))
    personal = x.copy()
    personal_loss = np.array([loss_fn(p) for p in x])
    best_idx = int(np.argmin(personal_loss))
    gbest = personal[best_idx].copy()
    gbest_loss = float(personal_loss[best_idx])

    rule = _StopRule(tolerance)
    rule.update(float(personal_loss.min()))
    trace = []
    for _ in range(max_iterations):
        r_cog = rng.random((population, dim))
        r_soc = rng.random((population, dim))
        v = inertia * v + cognitive * r_cog * (personal - x) + social * r_soc * (gbest - x)
        v = np.clip(v, -vmax, vmax)
        x = np.clip(x + v, lower, upper)
        iteration_best = math.inf
        for i in range(population):
            value = loss_fn(x[i])
            iteration_best = min(iteration_best, value)
            if value < personal_loss[i]:
                personal_loss[i] = value
                personal[i] = x[i].copy()
                if value < gbest_loss:
                    gbest_loss = float(value)
                    gbest = x[i].copy()
        trace.append(gbest_loss)
        if rule.update(iteration_best):
            break
    return gbest, np.asarray(trace)


def es_minimize(loss_fn, dim, bound, population, max_iterations, tolerance, seed, parents=15):
    """(mu + lambda) evolution strategy, self-adaptive steps, intermediate recombination."""
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    lower, upper = -bound, bound
    tau = 1.0 / math.sqrt(2.0 * math.sqrt(dim))
    tau_global = 1.0 / math.sqrt(2.0 * dim)
    sigma_init = 0.1 * (upper - lower)
    sigma_floor = 1e-12

    mu = min(parents, population)
    pop_x = rng.uniform(lower, upper, (mu, dim))
    pop_sigma = np.full((mu, dim), sigma_init)
    pop_loss = np.array([loss_fn(x) for x in pop_x])

    rule = _StopRule(tolerance)
    rule.update(float(pop_loss.min()))
    trace = []
    for _ in range(max_iterations):
        child_x = np.empty((population, dim))
        child_sigma = np.empty((population, dim))
        for k in range(population):
            pa, pb = rng.integers(mu, size=2)
            x_mix = 0.5 * (pop_x[pa] + pop_x[pb])
            sigma_mix = np.sqrt(pop_sigma[pa] * pop_sigma[pb])
            global_step = tau_global * rng.standard_normal()
            sigma = sigma_mix * np.exp(global_step + tau * rng.standard_normal(dim))
            sigma = np.maximum(sigma, sigma_floor)
            child_sigma[k] = sigma
            child_x[k] = np.clip(x_mix + sigma * rng.standard_normal(dim), lower, upper)
        child_loss = np.array([loss_fn(x) for x in child_x])

        all_x = np.vstack((pop_x, child_x))
        all_sigma = np.vstack((pop_sigma, child_sigma))
        all_loss = np.concatenate((pop_loss, child_loss))
        keep = np.argsort(all_loss, kind="stable")[:mu]
        pop_x, pop_sigma, pop_loss = all_x[keep], all_sigma[keep], all_loss[keep]

        trace.append(float(pop_loss[0]))
        if rule.update(float(child_loss.min())):
            break
    return pop_x[0].copy(), np.asarray(trace)


def ga_minimize(
    loss_fn, dim, bound, population, max_iterations, tolerance, seed,
    crossover_prob=0.9, elitism=1,
):
    """Tournament-2 genetic algorithm with uniform crossover and Gaussian mutation."""
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    lower, upper = -bound, bound
    mutation_prob = 1.0 / dim
    sigma_start = 0.1 * (upper - lower)

    x = rng.uniform(lower, upper, (population, dim))
    loss = np.array([loss_fn(ind) for ind in x])
    order = np.argsort(loss, kind="stable")
    best = x[order[0]].copy()
    best_loss = float(loss[order[0]])

    def tournament():
        a, b = rng.integers(population, size=2)
        return x[a] if loss[a] <= loss[b] else x[b]

    rule = _StopRule(tolerance)
    rule.update(best_loss)
    trace = []
    for iteration in range(max_iterations):
        # mutation scale anneals linearly so late generations can refine
        mutation_sigma = sigma_start * max(0.001, 1.0 - iteration / max_iterations)
        children = [x[i].copy() for i in np.argsort(loss, kind="stable")[:elitism]]
        while len(children) < population:
            mother, father = tournament(), tournament()
            if rng.random() < crossover_prob:
                mask = rng.random(dim) < 0.5
                first = np.where(mask, mother, father)
                second = np.where(mask, father, mother)
            else:
                first, second = mother.copy(), father.copy()
            for child in (first, second):
                if len(children) >= population:
                    break
                mask = rng.random(dim) < mutation_prob
                if not mask.any():
                    mask[rng.integers(dim)] = True  # never emit an exact clone
                child = child + mask * rng.standard_normal(dim) * mutation_sigma
                children.append(np.clip(child, lower, upper))
        x = np.asarray(children)
        loss = np.array([loss_fn(ind) for ind in x])
        idx = int(np.argmin(loss))
        if loss[idx] < best_loss:
            best_loss = float(loss[idx])
            best = x[idx].copy()
        trace.append(best_loss)
        # fresh children only: the copied elite would repeat its loss exactly
        if rule.update(float(loss[elitism:].min())):
            break
    return best, np.asarray(trace)


_MINIMIZERS = {
    "hho": hho_minimize,
    "pso": pso_minimize,
    "es": es_minimize,
    "ga": ga_minimize,
}


def train(
    config: TrainerConfig,
    topology: FnnTopology,
    data: TrainingSet,
    seed=None,
) -> tuple[np.ndarray, np.ndarray]:
    """Train the genome with the configured algorithm and loss.

    Runs until the best loss improves by less than the stopping tolerance
    between consecutive iterations, or the iteration cap is reached.
    Returns (best genome, best-so-far loss per iteration).
    """
    loss_fn = make_loss(config, topology, data)
    minimize = _MINIMIZERS[config.algorithm]
    genome, trace = minimize(
        loss_fn,
        topology.genome_length,
        config.weight_bound,
        config.population,
        config.max_iterations,
        config.stopping_tolerance,
        seed,
    )
    return genome, trace


def load_dataset_csv(path) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """Load a header-bearing CSV of (features..., class label) for MSE training.

    Features are min-max scaled to [0, 1] per column; labels become one-hot
    targets ordered by first appearance. Raises FileNotFoundError naming the
    missing path.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"dataset file not found: {path}")
    rows = [line.strip().split(",") for line in path.read_text().splitlines() if line.strip()]
    if len(rows) < 2:
        raise ValueError(f"dataset file {path} has no data rows")
    body = rows[1:]
    features = np.array([[float(v) for v in row[:-1]] for row in body])
    labels = [row[-1] for row in body]

    lows = features.min(axis=0)
    spans = features.max(axis=0) - lows
    spans = np.where(spans > 0.0, spans, 1.0)
    inputs = (features - lows) / spans

    classes = list(dict.fromkeys(labels))
    targets = np.zeros((len(labels), len(classes)))
    for row, label in enumerate(labels):
        targets[row, classes.index(label)] = 1.0
    return inputs, targets, classes
