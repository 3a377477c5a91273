"""
Command-line entry point.

Subcommands:
    run       Run a built-in experiment (classic, fsdm or both)
    surface   Sample a two-parameter error surface of an experiment's network
    sizing    Hidden-layer width estimate
    train     Train from a JSON config file
    kernel    Tabulate the adaptive order kernel
    list      Show the built-in experiments
"""
import argparse
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np
from loguru import logger
from rich.console import Console
from rich.table import Table

from configs import Settings, configure_logging, load_config
from harness.artifacts import write_kernel_csv, write_surface_csv
from harness.experiments import EXPERIMENTS, RunOutcome, execute_run, get_experiment, run_experiment
from harness.sizing import sizing_estimate
from harness.surface import AxisSpec, SurfaceGridSpec, sample_error_surface
from harness.train_config import load_train_config
from numerics.errors import ConfigError, FbpnnError
from trainer.order import kernel_curve

console = Console()


def _parse_mode(value: str) -> str:
    if value not in ("classic", "fsdm", "both"):
        raise argparse.ArgumentTypeError(f"mode must be classic, fsdm or both, got {value!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fbpnn",
        description="Fractional-order back-propagation networks trained by fractional steepest descent.",
    )
    parser.add_argument("--core-config", default=None, help="Path to core_config.yml")
    parser.add_argument("--data-config", default=None, help="Path to data_config.yml")
    parser.add_argument("--log-level", default=None, help="Override the configured log level")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run a built-in experiment")
    run.add_argument("experiment", help="Experiment id, e.g. ex1")
    run.add_argument("--mu", type=float, default=None, help="Learning rate")
    run.add_argument("--iters", type=int, default=None, help="Maximum iterations")
    run.add_argument("--mode", type=_parse_mode, default=None, help="classic, fsdm or both")
    run.add_argument("--w-inf", type=float, default=None, help="Weight lower bound")
    run.add_argument("--b-inf", type=float, default=None, help="Bias lower bound")
    run.add_argument("--n-max", type=int, choices=[1, 3], default=None, help="Series truncation")
    run.add_argument("--fixed-order", type=float, default=None, help="Constant fractional order")
    run.add_argument("--seed", type=int, default=None, help="Perturbation seed")
    run.add_argument("--out", default=None, help="Artifact directory")

    surface = sub.add_parser("surface", help="Sample a two-parameter error surface")
    surface.add_argument("--experiment", required=True, help="Experiment whose network and data are used")
    surface.add_argument("--param-a", required=True)
    surface.add_argument("--range-a", required=True, help="lo:hi:steps")
    surface.add_argument("--param-b", required=True)
    surface.add_argument("--range-b", required=True, help="lo:hi:steps")
    surface.add_argument("--out", default=None, help="Output CSV file")

    sizing = sub.add_parser("sizing", help="Hidden-layer width estimate")
    sizing.add_argument("--c", type=float, required=True)
    sizing.add_argument("--samples", type=float, required=True)
    sizing.add_argument("--inputs", type=int, required=True)

    train = sub.add_parser("train", help="Train from a JSON config file")
    train.add_argument("--config", required=True)
    train.add_argument("--out", default=None, help="Artifact directory")

    kernel = sub.add_parser("kernel", help="Tabulate the adaptive order kernel")
    kernel.add_argument("--lo", type=float, default=-1.0)
    kernel.add_argument("--hi", type=float, default=1.0)
    kernel.add_argument("--steps", type=int, default=201)
    kernel.add_argument("--out", default=None, help="Output CSV file")

    sub.add_parser("list", help="Show the built-in experiments")
    return parser


def _summary_table(outcomes: List[RunOutcome]) -> Table:
    table = Table(title="Run summary")
    for column in ("run", "mode", "status", "iterations", "final F̂", "final v", "tracked", "seconds"):
        table.add_column(column)
    for outcome in outcomes:
        s = outcome.summary
        tracked = ", ".join(f"{k}={v:.6g}" for k, v in s.final_params.items())
        table.add_row(
            s.experiment, s.mode, s.status, str(s.iterations), f"{s.final_f_hat:.6g}",
            f"{s.final_order:.6g}", tracked, f"{s.wall_seconds:.2f}",
        )
    return table


def cmd_run(args, settings: Settings) -> int:
    spec = get_experiment(args.experiment)
    overrides = {
        "learning_rate": args.mu,
        "max_iterations": args.iters,
        "mode": args.mode,
        "w_inf": args.w_inf,
        "b_inf": args.b_inf,
        "n_max": args.n_max,
        "fixed_order": args.fixed_order,
        "rng_seed": args.seed,
    }
    outcomes = run_experiment(spec, overrides, settings, Path(args.out) if args.out else None)
    console.print(_summary_table(outcomes))
    for outcome in outcomes:
        for kind, path in outcome.paths.items():
            console.print(f"  {kind}: {path}")
    return 0


def cmd_surface(args, settings: Settings) -> int:
    spec = get_experiment(args.experiment)
    template = spec.build_network(spec.optimum)
    grid = SurfaceGridSpec(
        a=AxisSpec.parse(args.param_a, args.range_a),
        b=AxisSpec.parse(args.param_b, args.range_b),
    )
    surface = sample_error_surface(template, spec.dataset(), grid, workers=settings.workers)
    out = Path(args.out) if args.out else (
        Path(settings.data.output.surfaces_dir) / f"{spec.id}_{grid.a.name}_{grid.b.name}.csv"
    )
    write_surface_csv(surface, out)
    a, b, mse = surface.argmin()
    console.print(f"Minimum {mse:.6g} at {grid.a.name}={a:.6g}, {grid.b.name}={b:.6g}")
    console.print(f"Surface written to {out}")
    return 0


def cmd_sizing(args, settings: Settings) -> int:
    console.print(str(sizing_estimate(args.c, args.samples, args.inputs)))
    return 0


def cmd_train(args, settings: Settings) -> int:
    job = load_train_config(args.config, settings)
    out = Path(args.out or settings.data.output.runs_dir)
    outcome = execute_run(job.name, job.config.mode, job.network, job.dataset, job.config, out)
    console.print(_summary_table([outcome]))
    for kind, path in outcome.paths.items():
        console.print(f"  {kind}: {path}")
    return 0


def cmd_kernel(args, settings: Settings) -> int:
    if args.steps < 2:
        raise ConfigError(f"kernel needs at least 2 steps, got {args.steps}")
    rows = kernel_curve(np.linspace(args.lo, args.hi, args.steps), settings.core.numerics.epsilon_phi)
    if args.out:
        write_kernel_csv(rows, args.out)
        console.print(f"Kernel written to {args.out}")
        return 0
    table = Table(title="Adaptive order kernel")
    table.add_column("e")
    table.add_column("v")
    for e, v in rows:
        table.add_row(f"{e:.6g}", f"{v:.6g}")
    console.print(table)
    return 0


def cmd_list(args, settings: Settings) -> int:
    table = Table(title="Built-in experiments")
    for column in ("id", "tracked", "initial", "μ", "iterations", "description"):
        table.add_column(column)
    for spec in EXPERIMENTS.values():
        table.add_row(
            spec.id, ", ".join(spec.tracked), str(spec.initial), f"{spec.learning_rate:g}",
            str(spec.max_iterations), spec.description,
        )
    console.print(table)
    return 0


COMMANDS = {
    "run": cmd_run,
    "surface": cmd_surface,
    "sizing": cmd_sizing,
    "train": cmd_train,
    "kernel": cmd_kernel,
    "list": cmd_list,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = load_config(args.core_config, args.data_config)
        configure_logging(settings, args.log_level)
        return COMMANDS[args.command](args, settings)
    except FbpnnError as e:
        logger.error(str(e))
        console.print(f"[red]error:[/red] {e}")
        return 2
    except OSError as e:
        console.print(f"[red]I/O error:[/red] {e}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
