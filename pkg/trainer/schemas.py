"""Run configuration and per-iteration trace of a training run."""
from dataclasses import dataclass, field
from typing import Annotated, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from numerics.errors import ConfigError


class FixedOrder(BaseModel):
    """Constant fractional order for the whole run."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["fixed"] = "fixed"
    value: float = Field(default=1.0, ge=0.0, allow_inf_nan=False)


class AdaptiveKernel(BaseModel):
    """Error-driven order schedule; epsilon_phi keeps Φ away from zero."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["adaptive"] = "adaptive"
    epsilon_phi: float = Field(default=1e-12, gt=0.0, allow_inf_nan=False)


OrderPolicy = Annotated[Union[FixedOrder, AdaptiveKernel], Field(discriminator="kind")]


class TrainerConfig(BaseModel):
    """
    Full configuration of one training run.

    Attributes:
        mode: classic first-order updates or fractional (fsdm) updates
        w_inf / b_inf: lower bounds of weights / biases; None derives
            min(initial parameters) - bound_offset
        trainable: parameter identifiers that may change; None means all
        track: parameter identifiers snapshotted into the trace
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    mode: Literal["classic", "fsdm"] = Field(default="fsdm")
    learning_rate: float = Field(default=0.1, ge=0.0, allow_inf_nan=False)
    max_iterations: int = Field(default=1000, gt=0)
    w_inf: Optional[float] = Field(default=None, allow_inf_nan=False)
    b_inf: Optional[float] = Field(default=None, allow_inf_nan=False)
    bound_offset: float = Field(default=200.0, gt=0.0)
    clamp_fraction: float = Field(default=1e-6, gt=0.0, lt=1.0)
    n_max: Literal[1, 3] = Field(default=3)
    order_policy: OrderPolicy = Field(default_factory=AdaptiveKernel)
    trainable: Optional[List[str]] = Field(default=None)
    track: List[str] = Field(default_factory=list)
    stop_tolerance: float = Field(default=1e-12, ge=0.0)
    saddle_epsilon: float = Field(default=1e-12, ge=0.0)
    perturbation_scale: float = Field(default=1e-3, ge=0.0)
    rng_seed: int = Field(default=0)
    batch: Literal["full", "per_sample"] = Field(default="full")
    log_every: int = Field(default=500, gt=0)

    @field_validator("trainable", "track")
    @classmethod
    def _no_duplicates(cls, names):
        if names is not None and len(set(names)) != len(names):
            raise ValueError(f"duplicate parameter names in {names}")
        return names

    @classmethod
    def from_dict(cls, data: dict) -> "TrainerConfig":
        """Validate a plain mapping, turning pydantic errors into ConfigError."""
        try:
            return cls.model_validate(data or {})
        except ValidationError as e:
            raise ConfigError(f"Invalid trainer configuration: {e}") from e

    def with_overrides(self, **changes) -> "TrainerConfig":
        merged = self.model_dump()
        merged.update({k: v for k, v in changes.items() if v is not None})
        return TrainerConfig.from_dict(merged)


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    f_hat: float
    order_v: float
    params: Tuple[float, ...]
    saddle_perturbed: bool = False


@dataclass
class TrainTrace:
    """Rows for every executed iteration plus the run outcome."""

    tracked: Tuple[str, ...]
    rows: List[TraceRow] = field(default_factory=list)
    status: Literal["running", "converged", "completed", "aborted"] = "running"
    message: Optional[str] = None

    def append(self, row: TraceRow) -> None:
        self.rows.append(row)

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def last(self) -> Optional[TraceRow]:
        return self.rows[-1] if self.rows else None

    @property
    def f_hat(self) -> np.ndarray:
        return np.array([row.f_hat for row in self.rows])

    @property
    def orders(self) -> np.ndarray:
        return np.array([row.order_v for row in self.rows])

    def param_history(self, name: str) -> np.ndarray:
        index = self.tracked.index(name)
        return np.array([row.params[index] for row in self.rows])

    @property
    def converged(self) -> bool:
        return self.status == "converged"
