"""Command-line front end for solves, sweeps, and trainer benchmarks.

All randomness flows from the master seed, so rerunning any subcommand
with the same config and seed reproduces its output files byte for byte
(wall-clock timings live in a separate sidecar file).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__, experiments, planner
from .config import SCHEMES, SWEEP_PARAMETERS, load_config

_COLUMN_DOCS = """\
output files and columns:
  solution.json       scheme, placement [x, y] (m), power_w per user,
                      per_user_rates_bps, sum_rate_bps, residuals (<= 0 when
                      satisfied), feasible, fitness (spectral units), seed
  sweep.csv           parameter, value (config units: mW/deg/m/count), scheme,
                      realization, seed, sum_rate_bps, feasible
  sweep_timing.csv    sidecar wall times per sweep row (not deterministic)
  convergence.csv     n_users, realization, seed, iteration, best_sum_rate_bps
  trainer.csv         algorithm, loss, iteration, best_loss
  trainer_summary.csv algorithm, loss, iterations_run, final_loss,
                      mean_sum_rate_bps, reference_sum_rate_bps
  bench_functions.csv function, dim, seed, iteration, best_fitness
"""


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", type=Path, help="flat YAML config file")
    sub.add_argument("--seed", type=int, help="master seed override")
    sub.add_argument("--out", type=Path, default=Path("."), help="output directory")
    sub.add_argument("--realizations", type=int, help="number of network realizations")
    sub.add_argument("--schemes", help="comma list from: " + ",".join(SCHEMES))
    sub.add_argument("--parallel", type=int, help="worker processes for sweeps")
    sub.add_argument("--population", type=int, help="optimizer population size")
    sub.add_argument("--iterations", type=int, help="optimizer iteration cap")


def _overrides(args: argparse.Namespace) -> dict:
    out = {
        "master_seed": args.seed,
        "realizations": args.realizations,
        "parallel": args.parallel,
        "population": args.population,
        "iterations": args.iterations,
    }
    if args.schemes:
        out["schemes"] = tuple(s.strip() for s in args.schemes.split(","))
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hawkvlc",
        description="Optical-downlink placement/power optimization experiments",
        epilog=_COLUMN_DOCS,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"hawkvlc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve one realization, write solution.json")
    _add_common(solve)
    solve.add_argument("--scheme", default="hhopap", choices=SCHEMES)
    solve.add_argument("--realization", type=int, default=0)

    sweep = sub.add_parser("sweep", help="parameter sweep over schemes and realizations")
    _add_common(sweep)
    sweep.add_argument("--parameter", choices=SWEEP_PARAMETERS, help="swept parameter")
    sweep.add_argument("--values", help="comma list of sweep values (config units)")

    converge = sub.add_parser("converge", help="per-iteration best sum rate traces")
    _add_common(converge)
    converge.add_argument("--n-users", dest="n_users", help="comma list of user counts")

    train = sub.add_parser("train", help="benchmark the network trainers")
    _add_common(train)
    train.add_argument("--dataset", type=Path, help="CSV dataset (features..., label)")
    train.add_argument("--loss", choices=("sum_rate", "match", "dataset_mse"))
    train.add_argument("--trainers", help="comma list from: hho,pso,es,ga")

    bench = sub.add_parser("bench-functions", help="optimizer check on test functions")
    _add_common(bench)
    bench.add_argument("--dim", type=int, default=5)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = _overrides(args)

    if args.command == "sweep":
        if args.parameter:
            overrides["sweep_parameter"] = args.parameter
        if args.values:
            overrides["sweep_values"] = tuple(float(v) for v in args.values.split(","))
    elif args.command == "converge":
        if args.n_users:
            overrides["convergence_n_users"] = tuple(int(v) for v in args.n_users.split(","))
    elif args.command == "train":
        if args.loss:
            overrides["trainer_loss"] = args.loss
        if args.trainers:
            overrides["trainer_algorithms"] = tuple(t.strip() for t in args.trainers.split(","))
        if args.iterations:
            overrides["trainer_iterations"] = args.iterations

    try:
        cfg = load_config(args.config, overrides)
    except (ValueError, OSError) as exc:
        print(f"hawkvlc: config error: {exc}", file=sys.stderr)
        return 2

    out: Path = args.out
    try:
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "solve":
            scenario = experiments.generate_scenario(cfg, args.realization)
            seed = experiments.derive_seed(cfg.master_seed, 5, args.realization, SCHEMES.index(args.scheme))
            params = planner.HhoParams(cfg.population, cfg.iterations)
            solution = experiments.solve_scheme(args.scheme, scenario, params, seed)
            (out / "solution.json").write_text(solution.to_json() + "\n")
            print(
                f"{args.scheme}: sum rate {solution.sum_rate / 1e6:.3f} Mbit/s, "
                f"feasible={solution.feasible} -> {out / 'solution.json'}"
            )
        elif args.command == "sweep":
            rows = experiments.run_sweep(cfg, out / "sweep.csv", out / "sweep_timing.csv")
            print(f"sweep: {len(rows)} new rows -> {out / 'sweep.csv'}")
        elif args.command == "converge":
            rows = experiments.run_convergence(cfg, out / "convergence.csv")
            print(f"converge: {len(rows)} rows -> {out / 'convergence.csv'}")
        elif args.command == "train":
            dataset = args.dataset if args.dataset else None
            _, summary = experiments.run_trainer_benchmark(
                cfg, out / "trainer.csv", out / "trainer_summary.csv", dataset
            )
            for row in summary:
                print(f"{row[0]}: final loss {row[3]:.6g}")
            print(f"train: -> {out / 'trainer.csv'}, {out / 'trainer_summary.csv'}")
        else:
            rows = experiments.run_benchmark_functions(cfg, out / "bench_functions.csv", dim=args.dim)
            print(f"bench-functions: {len(rows)} rows -> {out / 'bench_functions.csv'}")
    except FileNotFoundError as exc:
        print(f"hawkvlc: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"hawkvlc: write failed, partial output kept: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
