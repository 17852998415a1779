"""Reproducible experiment harness: scenario generation, sweeps, benchmarks.

Every random quantity derives from the master seed through fixed seed
trees, so a rerun with the same config reproduces every CSV byte for
byte. Sweep rows are written incrementally in a canonical order; an
interrupted sweep resumes by skipping rows already present in the output
file. Wall-clock timings go to a sidecar file that is explicitly outside
the determinism guarantee.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import __version__, baselines, fnn, planner, vlc
from .config import SCHEMES, ExperimentConfig

SWEEP_COLUMNS = ("parameter", "value", "scheme", "realization", "seed", "sum_rate_bps", "feasible")
CONVERGENCE_COLUMNS = ("n_users", "realization", "seed", "iteration", "best_sum_rate_bps")
TRACE_COLUMNS = ("algorithm", "loss", "iteration", "best_loss")
SUMMARY_COLUMNS = (
    "algorithm", "loss", "iterations_run", "final_loss",
    "mean_sum_rate_bps", "reference_sum_rate_bps",
)
BENCH_COLUMNS = ("function", "dim", "seed", "iteration", "best_fitness")

# namespaces of the per-purpose seed streams under the master seed
_NS_SCENARIO = 0
_NS_SWEEP = 1
_NS_CONVERGE = 2
_NS_TRAINER = 3
_NS_BENCH = 4


def derive_seed(master_seed: int, *parts: int) -> int:
    """Stable 64-bit seed from the master seed and integer path parts."""
    ss = np.random.SeedSequence((int(master_seed), *[int(p) for p in parts]))
    return int(ss.generate_state(2, np.uint64)[0])


def generate_scenario(config: ExperimentConfig, realization_index: int) -> vlc.Scenario:
    """Draw one network realization: users uniform on the centered ground square.

    The underlying unit-square draw depends only on (master_seed,
    realization_index), so sweeps over physical parameters keep user
    layouts paired across sweep values.
    """
    rng = np.random.default_rng(
        np.random.SeedSequence((int(config.master_seed), _NS_SCENARIO, int(realization_index)))
    )
    unit = rng.random((config.n_users, 2)) - 0.5
    return config.scenario_for_users(unit * config.square_side_m)


def solve_scheme(scheme: str, scenario: vlc.Scenario, params: planner.HhoParams, seed) -> planner.Solution:
    if scheme == "hhopap":
        return planner.solve(scenario, params, seed)
    return baselines.solve_baseline(baselines.BaselineKind(scheme), scenario, params, seed)


# --- CSV plumbing ----------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _header_lines(config: ExperimentConfig, columns) -> str:
    return (
        f"# hawkvlc {__version__} master_seed={config.master_seed}\n"
        + ",".join(columns) + "\n"
    )


def _write_rows(path, config: ExperimentConfig, columns, rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(_header_lines(config, columns))
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _read_completed(path, config: ExperimentConfig) -> set:
    """Keys of rows already present in a partially written sweep file."""
    path = Path(path)
    if not path.exists():
        return set()
    lines = path.read_text().splitlines()
    if not lines:
        return set()
    expected = f"# hawkvlc {__version__} master_seed={config.master_seed}"
    if lines[0].strip() != expected:
        raise ValueError(
            f"{path} was written with a different tool version or master seed; "
            "remove it or change the output path"
        )
    done = set()
    for line in lines[2:]:
        parts = line.split(",")
        if len(parts) == len(SWEEP_COLUMNS):
            done.add((parts[0], parts[1], parts[2], parts[3]))
    return done


class SweepRow(NamedTuple):
    parameter: str
    value: float
    scheme: str
    realization: int
    seed: int
    sum_rate_bps: float
    feasible: bool
    wall_time_s: float


def _sweep_tasks(config: ExperimentConfig):
    for value_index, value in enumerate(config.sweep_values):
        for scheme in config.schemes:
            for realization in range(config.realizations):
                yield value_index, float(value), scheme, realization


def _solve_sweep_task(args) -> SweepRow:
    config, value_index, value, scheme, realization = args
    point = config.with_sweep_value(config.sweep_parameter, value)
    scenario = generate_scenario(point, realization)
    # seed does not depend on the sweep value: common random numbers pair the
    # solver trajectories across sweep points, tightening trend comparisons
    seed = derive_seed(config.master_seed, _NS_SWEEP, SCHEMES.index(scheme), realization)
    params = planner.HhoParams(config.population, config.iterations)
    start = time.perf_counter()
    solution = solve_scheme(scheme, scenario, params, seed)
    elapsed = time.perf_counter() - start
    return SweepRow(
        parameter=config.sweep_parameter,
        value=value,
        scheme=scheme,
        realization=realization,
        seed=seed,
        sum_rate_bps=solution.sum_rate,
        feasible=solution.feasible,
        wall_time_s=elapsed,
    )


def run_sweep(config: ExperimentConfig, out_path, timing_path=None) -> list[SweepRow]:
    """Solve every (value, scheme, realization) cell and persist rows.

    Rows are appended in canonical order as they complete, so killing and
    rerunning the sweep resumes after the last full row. The main CSV
    contains only deterministic columns; wall times go to the sidecar.
    """
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    done = _read_completed(out_path, config)
    fresh = not out_path.exists() or not done and out_path.stat().st_size == 0

    tasks = []
    for value_index, value, scheme, realization in _sweep_tasks(config):
        key = (config.sweep_parameter, _fmt(value), scheme, str(realization))
        if key not in done:
            tasks.append((config, value_index, value, scheme, realization))

    rows: list[SweepRow] = []
    mode = "w" if fresh and not done else "a"
    timing_fh = None
    if timing_path is not None:
        timing_path = Path(timing_path)
        new_timing = not timing_path.exists()
        timing_fh = open(timing_path, "a", newline="")
        if new_timing:
            timing_fh.write("parameter,value,scheme,realization,wall_time_s\n")

    try:
        with open(out_path, mode, newline="") as fh:
            if mode == "w":
                fh.write(_header_lines(config, SWEEP_COLUMNS))
            if config.parallel > 1:
                executor = ProcessPoolExecutor(max_workers=config.parallel)
                results = executor.map(_solve_sweep_task, tasks, chunksize=1)
            else:
                executor = None
                results = map(_solve_sweep_task, tasks)
            try:
                for row in results:
                    rows.append(row)
                    fh.write(",".join(_fmt(v) for v in row[: len(SWEEP_COLUMNS)]) + "\n")
                    fh.flush()
                    if timing_fh is not None:
                        timing_fh.write(
                            f"{row.parameter},{_fmt(row.value)},{row.scheme},"
                            f"{row.realization},{row.wall_time_s!r}\n"
                        )
            finally:
                if executor is not None:
                    executor.shutdown()
    finally:
        if timing_fh is not None:
            timing_fh.close()
    return rows


def load_sweep_rows(path) -> list[SweepRow]:
    """Parse a sweep CSV back into rows (wall time unavailable, set to 0)."""
    lines = Path(path).read_text().splitlines()
    rows = []
    for line in lines:
        if line.startswith("#") or line.startswith("parameter,") or not line.strip():
            continue
        parameter, value, scheme, realization, seed, sum_rate, feasible = line.split(",")
        rows.append(SweepRow(
            parameter, float(value), scheme, int(realization),
            int(seed), float(sum_rate), feasible == "true", 0.0,
        ))
    return rows


def mean_sum_rates(rows: list[SweepRow]) -> dict:
    """{(scheme, value): mean sum rate over realizations}."""
    sums: dict = {}
    counts: dict = {}
    for row in rows:
        key = (row.scheme, row.value)
        sums[key] = sums.get(key, 0.0) + row.sum_rate_bps
        counts[key] = counts.get(key, 0) + 1
    return {key: sums[key] / counts[key] for key in sums}


# --- convergence traces ----------------------------------------------------

def run_convergence(config: ExperimentConfig, out_path) -> list[tuple]:
    """Best sum rate per iteration for each configured user count."""
    rows = []
    params = planner.HhoParams(config.population, config.iterations)
    for n in config.convergence_n_users:
        point = config.replace(
            n_users=int(n), rate_min_kbps=config.convergence_rate_min_kbps
        )
        for realization in range(config.realizations):
            scenario = generate_scenario(point, realization)
            seed = derive_seed(config.master_seed, _NS_CONVERGE, int(n), realization)
            solution = planner.solve(scenario, params, seed)
            for iteration, best in enumerate(solution.trace, start=1):
                rows.append((int(n), realization, seed, iteration, best * config.bandwidth_hz))
    _write_rows(out_path, config, CONVERGENCE_COLUMNS, rows)
    return rows


# --- trainer benchmark -----------------------------------------------------

def _trainer_config(config: ExperimentConfig, algorithm: str, loss: str) -> fnn.TrainerConfig:
    return fnn.TrainerConfig(
        algorithm=algorithm,
        loss=loss,
        population=config.trainer_population,
        stopping_tolerance=config.trainer_tolerance,
        max_iterations=config.trainer_iterations,
        weight_bound=config.trainer_weight_bound,
    )


def run_trainer_benchmark(config: ExperimentConfig, trace_path, summary_path, dataset_path=None):
    """Train each configured algorithm and record traces plus final quality.

    In dataset mode the benchmark minimizes mean squared error on the CSV
    samples. In scenario mode it trains on a fixed batch of realizations
    and reports the mean achieved sum rate next to the joint-solver
    reference on the same batch (also the target for the match loss).
    """
    trace_rows = []
    summary_rows = []

    if dataset_path is not None:
        inputs, targets, classes = fnn.load_dataset_csv(dataset_path)
        topology = fnn.FnnTopology(inputs.shape[1], config.trainer_hidden, len(classes))
        data = fnn.TrainingSet.from_dataset(inputs, targets)
        loss_kind = "dataset_mse"
        reference = ""
        evaluate = None
    else:
        batch = [generate_scenario(config, i) for i in range(config.trainer_batch)]
        params = planner.HhoParams(config.population, config.iterations)
        reference_solutions = [
            planner.solve(s, params, derive_seed(config.master_seed, _NS_TRAINER, 0, i))
            for i, s in enumerate(batch)
        ]
        reference_se = np.array([sol.sum_rate / config.bandwidth_hz for sol in reference_solutions])
        topology = fnn.FnnTopology.for_scenario(config.n_users)
        data = fnn.TrainingSet.from_scenarios(batch, reference_se)
        loss_kind = config.trainer_loss
        reference = float(np.mean(reference_se) * config.bandwidth_hz)

        def evaluate(genome):
            rates = [
                fnn.network_sum_efficiency(genome, topology, s) * config.bandwidth_hz
                for s in batch
            ]
            return float(np.mean(rates))

    for algo_index, algorithm in enumerate(config.trainer_algorithms):
        trainer = _trainer_config(config, algorithm, loss_kind)
        seed = derive_seed(config.master_seed, _NS_TRAINER, 1, algo_index)
        genome, trace = fnn.train(trainer, topology, data, seed)
        for iteration, best in enumerate(trace, start=1):
            trace_rows.append((algorithm, loss_kind, iteration, float(best)))
        summary_rows.append((
            algorithm,
            loss_kind,
            len(trace),
            float(trace[-1]),
            evaluate(genome) if evaluate is not None else "",
            reference,
        ))

    _write_rows(trace_path, config, TRACE_COLUMNS, trace_rows)
    _write_rows(summary_path, config, SUMMARY_COLUMNS, summary_rows)
    return trace_rows, summary_rows


# --- optimizer test functions ---------------------------------------------

def _sphere(x):
    return -float(np.sum(x * x))


def _rosenbrock(x):
    return -float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2))


def _rastrigin(x):
    return -float(10.0 * x.size + np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x)))


BENCH_FUNCTIONS = {
    "sphere": (_sphere, -10.0, 10.0),
    "rosenbrock": (_rosenbrock, -5.0, 10.0),
    "rastrigin": (_rastrigin, -5.12, 5.12),
}


def run_benchmark_functions(config: ExperimentConfig, out_path, dim: int = 5) -> list[tuple]:
    """Maximize the negated classic test functions and record the traces."""
    from . import hho

    rows = []
    for f_index, (name, (fn, lower, upper)) in enumerate(BENCH_FUNCTIONS.items()):
        space = hho.SearchSpace(np.full(dim, lower), np.full(dim, upper))
        seed = derive_seed(config.master_seed, _NS_BENCH, f_index)
        _, _, trace = hho.optimize(
            space, fn, config.population, config.iterations, seed=seed
        )
        for iteration, best in enumerate(trace, start=1):
            rows.append((name, dim, seed, iteration, float(best)))
    _write_rows(out_path, config, BENCH_COLUMNS, rows)
    return rows
