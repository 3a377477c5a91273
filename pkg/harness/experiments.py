"""Built-in experiments and their runner."""
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Literal, Optional, Tuple

import allure
from loguru import logger
from pydantic import BaseModel

from configs import Settings, get_settings
from harness.artifacts import write_response_csv, write_summary_json, write_trace_csv
from harness.builders import (
    EX5_RELATIVE_OPTIMUM,
    EX5_TRACKED,
    BUMP_LOCAL_EXTREMUM,
    BUMP_OPTIMUM,
    BUMP_TRACKED,
    build_ex5_network,
    build_bump_network,
    build_bump_dataset,
    filter_dataset,
)
from harness.factory import RunFactory
from network.mlp import Dataset, Mlp, mean_squared_error
from numerics.errors import ConfigError
from trainer.loop import train
from trainer.schemas import TrainerConfig, TrainTrace


@dataclass(frozen=True)
class ExperimentSpec:
    """A two-parameter training experiment; every other parameter stays frozen."""

    id: str
    description: str
    network: Callable[[Tuple[float, float]], Mlp]
    dataset: Callable[[], Dataset]
    tracked: Tuple[str, str]
    initial: Tuple[float, float]
    learning_rate: float
    max_iterations: int
    optimum: Tuple[float, float]
    modes: Literal["classic", "fsdm", "both"] = "both"

    def build_network(self, initial: Optional[Tuple[float, float]] = None) -> Mlp:
        return self.network(tuple(initial) if initial is not None else self.initial)


def _bump(initial: Tuple[float, float]) -> Mlp:
    return build_bump_network(optimal=False, tracked=initial)


def _bump_experiment(id: str, description: str, initial, iterations: int) -> ExperimentSpec:
    return ExperimentSpec(
        id=id,
        description=description,
        network=_bump,
        dataset=build_bump_dataset,
        tracked=BUMP_TRACKED,
        initial=initial,
        learning_rate=5.50,
        max_iterations=iterations,
        optimum=BUMP_OPTIMUM,
    )


def _ex5_experiment(id: str, description: str, initial) -> ExperimentSpec:
    return ExperimentSpec(
        id=id,
        description=description,
        network=build_ex5_network,
        dataset=filter_dataset,
        tracked=EX5_TRACKED,
        initial=initial,
        learning_rate=3.50,
        max_iterations=3000,
        optimum=EX5_RELATIVE_OPTIMUM,
    )


EXPERIMENTS: Dict[str, ExperimentSpec] = {
    spec.id: spec
    for spec in (
        _bump_experiment("ex1", "1-2-1 network from (-4, -4)", (-4.0, -4.0), 2000),
        _bump_experiment("ex2", "1-2-1 network from (5, 30), near the local extremum", (5.0, 30.0), 9000),
        _bump_experiment("ex3", "1-2-1 network from (-8, 9)", (-8.0, 9.0), 6000),
        _bump_experiment("ex4", "1-2-1 network started at the local extremum", BUMP_LOCAL_EXTREMUM, 9000),
        _ex5_experiment("ex5a", "1-15-1 filter network from (108, 116)", (108.0, 116.0)),
        _ex5_experiment("ex5b", "1-15-1 filter network from (-110, -106)", (-110.0, -106.0)),
        _ex5_experiment("ex5c", "1-15-1 filter network from (-95, 100)", (-95.0, 100.0)),
        _ex5_experiment("ex5d", "1-15-1 filter network at the local extremum", (-9.00, 8.2676)),
    )
}


def get_experiment(experiment_id: str) -> ExperimentSpec:
    try:
        return EXPERIMENTS[experiment_id]
    except KeyError:
        raise ConfigError(
            f"Unknown experiment {experiment_id!r}, expected one of {sorted(EXPERIMENTS)}"
        ) from None


class RunSummary(BaseModel):
    """Outcome of one run, taken from the last trace row."""

    experiment: str
    mode: str
    final_f_hat: float
    final_order: float
    final_params: Dict[str, float]
    trained_mse: float
    iterations: int
    converged: bool
    status: str
    message: Optional[str] = None
    wall_seconds: float

    @classmethod
    def from_run(
        cls, experiment: str, mode: str, trace: TrainTrace, trained: Mlp, data: Dataset, seconds: float
    ) -> "RunSummary":
        last = trace.last
        return cls(
            experiment=experiment,
            mode=mode,
            final_f_hat=last.f_hat if last else float("nan"),
            final_order=last.order_v if last else float("nan"),
            final_params=dict(zip(trace.tracked, last.params)) if last else {},
            trained_mse=mean_squared_error(trained, data),
            iterations=len(trace),
            converged=trace.converged,
            status=trace.status,
            message=trace.message,
            wall_seconds=seconds,
        )


@dataclass
class RunOutcome:
    summary: RunSummary
    trace: TrainTrace
    network: Mlp
    paths: Dict[str, Path] = field(default_factory=dict)


def execute_run(
    run_id: str,
    mode: str,
    start: Mlp,
    data: Dataset,
    config: TrainerConfig,
    out_dir: Optional[Path] = None,
) -> RunOutcome:
    """Train once, summarise, and write trace, summary and response files when out_dir is set."""
    with allure.step(f"Run {run_id} ({mode})"):
        started = time.perf_counter()
        trained, trace = train(start, data, config)
        seconds = time.perf_counter() - started
        summary = RunSummary.from_run(run_id, mode, trace, trained, data, seconds)
        outcome = RunOutcome(summary, trace, trained)
        if out_dir is not None:
            stem = Path(out_dir) / f"{run_id}_{mode}"
            outcome.paths = {
                "trace": write_trace_csv(trace, f"{stem}_trace.csv"),
                "summary": write_summary_json(summary.model_dump(), f"{stem}_summary.json"),
                "response": write_response_csv(trained, data, f"{stem}_response.csv"),
            }
        allure.attach(
            json.dumps(summary.model_dump(), indent=2),
            name=f"{run_id}_{mode}_summary",
            attachment_type=allure.attachment_type.JSON,
        )
    logger.info(
        f"{run_id} [{mode}] {summary.status}: F̂={summary.final_f_hat:.6g}, "
        f"iterations={summary.iterations}, {seconds:.2f}s"
    )
    return outcome


def run_experiment(
    spec: ExperimentSpec,
    overrides: Optional[dict] = None,
    settings: Optional[Settings] = None,
    out_dir: Optional[Path] = None,
    write: bool = True,
) -> List[RunOutcome]:
    """
    Run the classic and/or fsdm variants of a registered experiment.

    Args:
        overrides: CLI-level overrides (see harness.factory.OVERRIDE_KEYS)
        out_dir: artifact directory; defaults to output.runs_dir of the settings
        write: write trace, summary and response files
    """
    settings = settings or get_settings()
    plan = RunFactory(settings, overrides).plan(spec)
    data = spec.dataset()
    start = spec.build_network(plan.initial)
    target = Path(out_dir or settings.data.output.runs_dir) if write else None
    return [
        execute_run(spec.id, mode, start, data, config, target)
        for mode, config in plan.configs.items()
    ]


def run_experiments(
    ids: Iterable[str],
    overrides: Optional[dict] = None,
    settings: Optional[Settings] = None,
    out_dir: Optional[Path] = None,
    concurrent: bool = False,
    write: bool = True,
) -> Dict[str, List[RunOutcome]]:
    """Several experiments, sequentially or in a thread pool; results keyed by id in input order."""
    settings = settings or get_settings()
    specs = [get_experiment(i) for i in ids]

    def one(spec: ExperimentSpec) -> List[RunOutcome]:
        return run_experiment(spec, overrides, settings, out_dir, write)

    if concurrent and len(specs) > 1:
        with ThreadPoolExecutor(max_workers=settings.workers) as executor:
            results = list(executor.map(one, specs))
    else:
        results = [one(spec) for spec in specs]
    return {spec.id: outcome for spec, outcome in zip(specs, results)}
