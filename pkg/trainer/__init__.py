"""Classic and fractional (FSDM) training of multilayer perceptrons."""

# Configuration and trace
from trainer.schemas import (
    AdaptiveKernel,
    FixedOrder,
    OrderPolicy,
    TraceRow,
    TrainerConfig,
    TrainTrace,
)

# Step rules
from trainer.base import (
    BaseStepRule,
    BatchStatistics,
    LayerArrays,
    ParameterMask,
    batch_statistics,
    derivative_terms,
)
from trainer.rules import (
    ClassicStepRule,
    FsdmStepRule,
    build_rule,
    classic_gradient,
    fractional_partial,
    fractional_partials,
    resolve_bounds,
    step_classic,
    step_fsdm,
)

# Order schedule and diagnostics
from trainer.order import OrderBounds, adaptive_order, kernel_curve, order_bounds

# Loop
from trainer.loop import ConvergenceState, convergence_check, perturb, train

__all__ = [
    "AdaptiveKernel",
    "FixedOrder",
    "OrderPolicy",
    "TraceRow",
    "TrainerConfig",
    "TrainTrace",
    "BaseStepRule",
    "BatchStatistics",
    "LayerArrays",
    "ParameterMask",
    "batch_statistics",
    "derivative_terms",
    "ClassicStepRule",
    "FsdmStepRule",
    "build_rule",
    "classic_gradient",
    "fractional_partial",
    "fractional_partials",
    "resolve_bounds",
    "step_classic",
    "step_fsdm",
    "OrderBounds",
    "adaptive_order",
    "kernel_curve",
    "order_bounds",
    "ConvergenceState",
    "convergence_check",
    "perturb",
    "train",
]
