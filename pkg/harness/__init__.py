# Harness module
from harness.builders import (
    DATASETS,
    build_ex5_network,
    build_bump_network,
    build_bump_dataset,
    filter_dataset,
)
from harness.experiments import (
    EXPERIMENTS,
    ExperimentSpec,
    RunOutcome,
    RunSummary,
    execute_run,
    get_experiment,
    run_experiment,
    run_experiments,
)
from harness.factory import RunFactory, RunPlan
from harness.sizing import sizing_estimate
from harness.surface import AxisSpec, ErrorSurface, SurfaceGridSpec, sample_error_surface
from harness.train_config import TrainJob, load_train_config, parse_train_config

__all__ = [
    "DATASETS",
    "build_ex5_network",
    "build_bump_network",
    "build_bump_dataset",
    "filter_dataset",
    "EXPERIMENTS",
    "ExperimentSpec",
    "RunOutcome",
    "RunSummary",
    "execute_run",
    "get_experiment",
    "run_experiment",
    "run_experiments",
    "RunFactory",
    "RunPlan",
    "sizing_estimate",
    "AxisSpec",
    "ErrorSurface",
    "SurfaceGridSpec",
    "sample_error_surface",
    "TrainJob",
    "load_train_config",
    "parse_train_config",
]
