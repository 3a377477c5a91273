"""Two-parameter error surfaces over a frozen network template."""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, Tuple

import allure
import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, model_validator

from network.mlp import Dataset, Mlp, mean_squared_error
from numerics.errors import ConfigError


class AxisSpec(BaseModel):
    """One swept parameter: identifier and an inclusive linear range."""

    model_config = ConfigDict(frozen=True)

    name: str
    lo: float = Field(allow_inf_nan=False)
    hi: float = Field(allow_inf_nan=False)
    steps: int = Field(ge=2)

    @model_validator(mode="after")
    def _ordered(self) -> "AxisSpec":
        if not self.lo < self.hi:
            raise ValueError(f"axis {self.name}: lo ({self.lo}) must be below hi ({self.hi})")
        return self

    @classmethod
    def parse(cls, name: str, text: str) -> "AxisSpec":
        """Build from a 'lo:hi:steps' string."""
        try:
            lo, hi, steps = text.split(":")
            return cls(name=name, lo=float(lo), hi=float(hi), steps=int(steps))
        except ValueError as e:
            raise ConfigError(f"Invalid range {text!r} for {name}: {e}") from e

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.steps)


class SurfaceGridSpec(BaseModel):
    """Two axes plus optional fixed values for other parameters."""

    model_config = ConfigDict(frozen=True)

    a: AxisSpec
    b: AxisSpec
    fixed: Dict[str, float] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _distinct(self) -> "SurfaceGridSpec":
        if self.a.name == self.b.name:
            raise ValueError(f"both axes sweep {self.a.name}")
        return self


@dataclass(frozen=True)
class ErrorSurface:
    """values[i, j] is the mean squared error at (a.values[i], b.values[j])."""

    grid: SurfaceGridSpec
    values: np.ndarray

    @property
    def a_values(self) -> np.ndarray:
        return self.grid.a.values

    @property
    def b_values(self) -> np.ndarray:
        return self.grid.b.values

    def cells(self):
        """(a, b, mse) in row-major order."""
        for i, a in enumerate(self.a_values):
            for j, b in enumerate(self.b_values):
                yield float(a), float(b), float(self.values[i, j])

    def argmin(self) -> Tuple[float, float, float]:
        i, j = np.unravel_index(int(np.argmin(self.values)), self.values.shape)
        return float(self.a_values[i]), float(self.b_values[j]), float(self.values[i, j])


def sample_error_surface(
    template: Mlp, data: Dataset, grid: SurfaceGridSpec, workers: int = 1
) -> ErrorSurface:
    """
    Mean squared error at every grid point, rows evaluated in parallel.

    Raises:
        ConfigError: an axis or fixed parameter does not exist in the template
    """
    for name in (grid.a.name, grid.b.name, *grid.fixed):
        template.resolve(name)
    data.check_against(template)
    base = template.with_parameters(grid.fixed) if grid.fixed else template
    b_values = grid.b.values

    def row(a: float) -> np.ndarray:
        return np.array([
            mean_squared_error(base.with_parameters({grid.a.name: a, grid.b.name: b}), data)
            for b in b_values
        ])

    with allure.step(f"Sample error surface {grid.a.name} x {grid.b.name}"):
        logger.info(
            f"Sampling {grid.a.steps}x{grid.b.steps} surface over "
            f"{grid.a.name} x {grid.b.name} with {workers} worker(s)"
        )
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as executor:
                rows = list(executor.map(row, grid.a.values))
        else:
            rows = [row(a) for a in grid.a.values]
    return ErrorSurface(grid=grid, values=np.vstack(rows))
