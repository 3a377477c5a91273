"""CSV and JSON artifacts of runs, surfaces and the order kernel."""
import csv
import json
from pathlib import Path
from string import ascii_lowercase
from typing import Iterable, Optional, Sequence, Union

import numpy as np
from loguru import logger

from network.mlp import Dataset, Mlp, forward
from harness.surface import AxisSpec, ErrorSurface, SurfaceGridSpec
from trainer.schemas import TraceRow, TrainTrace

PathLike = Union[str, Path]


def fmt(value: float) -> str:
    """Decimal real with 17 significant digits."""
    return format(float(value), ".17g")


def _bool(value: bool) -> str:
    return "true" if value else "false"


def param_columns(count: int) -> list:
    return [f"param_{ascii_lowercase[k]}" for k in range(count)]


def _open_for_write(path: PathLike):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        return open(path, "w", newline="", encoding="utf-8")
    except OSError as e:
        raise OSError(f"Cannot write {path}: {e}") from e


def write_trace_csv(trace: TrainTrace, path: PathLike) -> Path:
    with _open_for_write(path) as f:
        writer = csv.writer(f)
        writer.writerow(
            ["iteration", "f_hat", "order_v", *param_columns(len(trace.tracked)), "saddle_perturbed"]
        )
        for row in trace.rows:
            writer.writerow(
                [row.iteration, fmt(row.f_hat), fmt(row.order_v), *map(fmt, row.params),
                 _bool(row.saddle_perturbed)]
            )
    logger.debug(f"Wrote trace ({len(trace)} rows) to {path}")
    return Path(path)


def read_trace_csv(
    path: PathLike, tracked: Optional[Sequence[str]] = None, status: str = "completed"
) -> TrainTrace:
    """Parse a trace CSV; tracked names default to the param_* column names."""
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader)
        params = [c for c in header if c.startswith("param_")]
        rows = [
            TraceRow(
                iteration=int(record[0]),
                f_hat=float(record[1]),
                order_v=float(record[2]),
                params=tuple(float(x) for x in record[3:3 + len(params)]),
                saddle_perturbed=record[-1] == "true",
            )
            for record in reader if record
        ]
    return TrainTrace(tracked=tuple(tracked or params), rows=rows, status=status)


def write_summary_json(summary: dict, path: PathLike) -> Path:
    with _open_for_write(path) as f:
        json.dump(summary, f, indent=2, sort_keys=True)
    return Path(path)


def read_summary_json(path: PathLike) -> dict:
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def write_response_csv(mlp: Mlp, data: Dataset, path: PathLike) -> Path:
    """Input, target and fitted output for every sample (one column each per width)."""
    output = forward(mlp, data.inputs).output
    r, q = data.input_width, data.target_width
    header = (
        ["input"] if r == 1 else [f"input_{k + 1}" for k in range(r)]
    ) + (
        ["target", "output"] if q == 1
        else [f"target_{k + 1}" for k in range(q)] + [f"output_{k + 1}" for k in range(q)]
    )
    with _open_for_write(path) as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for p, t, o in zip(data.inputs, data.targets, output):
            writer.writerow([*map(fmt, p), *map(fmt, t), *map(fmt, o)])
    return Path(path)


def write_surface_csv(surface: ErrorSurface, path: PathLike) -> Path:
    grid = surface.grid
    with _open_for_write(path) as f:
        for tag, axis in (("a", grid.a), ("b", grid.b)):
            f.write(f"# {tag},{axis.name},{fmt(axis.lo)},{fmt(axis.hi)},{axis.steps}\n")
        writer = csv.writer(f)
        writer.writerow(["a", "b", "mse"])
        for a, b, mse in surface.cells():
            writer.writerow([fmt(a), fmt(b), fmt(mse)])
    logger.debug(f"Wrote {grid.a.steps}x{grid.b.steps} surface to {path}")
    return Path(path)


def read_surface_csv(path: PathLike) -> ErrorSurface:
    axes = {}
    values = []
    with open(path, newline="", encoding="utf-8") as f:
        for line in f:
            if line.startswith("#"):
                tag, name, lo, hi, steps = line[1:].strip().split(",")
                axes[tag] = AxisSpec(name=name, lo=float(lo), hi=float(hi), steps=int(steps))
            elif line.strip() and not line.startswith("a,"):
                values.append(float(line.strip().split(",")[2]))
    grid = SurfaceGridSpec(a=axes["a"], b=axes["b"])
    return ErrorSurface(grid=grid, values=np.array(values).reshape(grid.a.steps, grid.b.steps))


def write_kernel_csv(rows: Iterable, path: PathLike) -> Path:
    with _open_for_write(path) as f:
        writer = csv.writer(f)
        writer.writerow(["e", "order_v"])
        for e, v in rows:
            writer.writerow([fmt(e), fmt(v)])
    return Path(path)
