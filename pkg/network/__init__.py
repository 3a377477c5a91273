# Network module
from .mlp import (
    ActivationKind,
    LayerParams,
    ParameterRef,
    Mlp,
    ForwardTrace,
    Dataset,
    activation_eval,
    activation_derivatives,
    forward,
    squared_error,
    mean_squared_error,
)
from .sensitivity import (
    SensitivityStack,
    output_sensitivities,
    backprop_sensitivities,
    sensitivities,
)

__all__ = [
    "ActivationKind",
    "LayerParams",
    "ParameterRef",
    "Mlp",
    "ForwardTrace",
    "Dataset",
    "activation_eval",
    "activation_derivatives",
    "forward",
    "squared_error",
    "mean_squared_error",
    "SensitivityStack",
    "output_sensitivities",
    "backprop_sensitivities",
    "sensitivities",
]
