"""Multilayer perceptron: parameters, activations, forward pass and errors."""
import re
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from numerics.errors import ConfigError, PreconditionError, ShapeError


class ActivationKind(str, Enum):
    """Supported transfer functions, serialised by value."""

    LOG_SIGMOID = "logsig"
    TAN_SIGMOID = "tansig"
    LINEAR = "purelin"

    @classmethod
    def parse(cls, name: str) -> "ActivationKind":
        aliases = {
            "logsig": cls.LOG_SIGMOID,
            "log_sigmoid": cls.LOG_SIGMOID,
            "logsigmoid": cls.LOG_SIGMOID,
            "tansig": cls.TAN_SIGMOID,
            "tan_sigmoid": cls.TAN_SIGMOID,
            "tansigmoid": cls.TAN_SIGMOID,
            "purelin": cls.LINEAR,
            "linear": cls.LINEAR,
        }
        try:
            return aliases[str(name).lower()]
        except KeyError:
            raise ConfigError(f"Unknown activation: {name!r}") from None


def _log_sigmoid(g: np.ndarray) -> np.ndarray:
    # exp of a non-positive argument only, so large |g| never overflows
    e = np.exp(-np.abs(g))
    return np.where(g >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def activation_derivatives(kind: ActivationKind, g) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Return (f, f', f'', f''') of the activation at g, elementwise."""
    g = np.asarray(g, dtype=float)
    if kind is ActivationKind.LOG_SIGMOID:
        s = _log_sigmoid(g)
        d1 = s * (1.0 - s)
        return s, d1, d1 * (1.0 - 2.0 * s), d1 * (1.0 - 6.0 * s + 6.0 * s * s)
    if kind is ActivationKind.TAN_SIGMOID:
        t = np.tanh(g)
        d1 = 1.0 - t * t
        return t, d1, -2.0 * t * d1, -2.0 * d1 * (1.0 - 3.0 * t * t)
    zeros = np.zeros_like(g)
    return g.copy(), np.ones_like(g), zeros, zeros.copy()


def activation_eval(kind: ActivationKind, g: float, order: int = 0) -> float:
    """Order-th derivative (0..3) of the activation at a scalar g."""
    if order not in (0, 1, 2, 3):
        raise PreconditionError(f"activation derivative order must be 0..3, got {order}")
    return float(activation_derivatives(kind, g)[order])


def _readonly(values, ndim: int, what: str) -> np.ndarray:
    array = np.array(values, dtype=float, ndmin=ndim)
    if array.ndim != ndim:
        raise ShapeError(f"{what} must be {ndim}-dimensional, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise ShapeError(f"{what} contains non-finite entries")
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class LayerParams:
    """Weights (out x in), biases (out,) and the activation of one layer."""

    weights: np.ndarray
    biases: np.ndarray
    activation: ActivationKind

    def __post_init__(self):
        weights = _readonly(self.weights, 2, "weights")
        biases = _readonly(self.biases, 1, "biases")
        if weights.shape[0] < 1 or weights.shape[1] < 1:
            raise ShapeError(f"layer needs at least one neuron and one input, got {weights.shape}")
        if biases.shape[0] != weights.shape[0]:
            raise ShapeError(
                f"{biases.shape[0]} biases for {weights.shape[0]} neurons"
            )
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "biases", biases)
        if not isinstance(self.activation, ActivationKind):
            object.__setattr__(self, "activation", ActivationKind.parse(self.activation))

    @property
    def out_width(self) -> int:
        return self.weights.shape[0]

    @property
    def in_width(self) -> int:
        return self.weights.shape[1]


_PARAM_PATTERN = re.compile(r"^(?:w(\d+)_(\d+)_(\d+)|b(\d+)_(\d+))$")


@dataclass(frozen=True)
class ParameterRef:
    """Parsed parameter identifier with zero-based indices."""

    name: str
    kind: str  # "w" or "b"
    layer: int
    row: int
    col: int = 0

    @classmethod
    def parse(cls, name: str) -> "ParameterRef":
        match = _PARAM_PATTERN.match(name.strip())
        if not match:
            raise ConfigError(f"Unknown parameter identifier: {name!r}")
        if match.group(1):
            layer, row, col = (int(match.group(k)) for k in (1, 2, 3))
            return cls(name.strip(), "w", layer - 1, row - 1, col - 1)
        layer, row = int(match.group(4)), int(match.group(5))
        return cls(name.strip(), "b", layer - 1, row - 1)


@dataclass(frozen=True)
class Mlp:
    """Layered network; layer m feeds layer m+1 and the first layer reads R inputs."""

    layers: Tuple[LayerParams, ...]
    input_width: int

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise ShapeError("network needs at least one layer")
        if self.input_width < 1:
            raise ShapeError(f"input width must be positive, got {self.input_width}")
        expected = self.input_width
        for index, layer in enumerate(layers, start=1):
            if layer.in_width != expected:
                raise ShapeError(
                    f"layer {index} expects {layer.in_width} inputs, previous width is {expected}"
                )
            expected = layer.out_width
        object.__setattr__(self, "layers", layers)

    @classmethod
    def from_arrays(
        cls,
        weights: Sequence,
        biases: Sequence,
        activations: Sequence,
    ) -> "Mlp":
        if not (len(weights) == len(biases) == len(activations)) or not weights:
            raise ShapeError("weights, biases and activations must have one entry per layer")
        layers = tuple(
            LayerParams(np.asarray(w, dtype=float), np.asarray(b, dtype=float).reshape(-1), a)
            for w, b, a in zip(weights, biases, activations)
        )
        return cls(layers, layers[0].in_width)

    @property
    def widths(self) -> Tuple[int, ...]:
        return tuple(layer.out_width for layer in self.layers)

    @property
    def output_width(self) -> int:
        return self.layers[-1].out_width

    @property
    def weights(self) -> List[np.ndarray]:
        return [layer.weights for layer in self.layers]

    @property
    def biases(self) -> List[np.ndarray]:
        return [layer.biases for layer in self.layers]

    def parameter_names(self) -> List[str]:
        names = []
        for m, layer in enumerate(self.layers, start=1):
            for i in range(layer.out_width):
                names.extend(f"w{m}_{i + 1}_{j + 1}" for j in range(layer.in_width))
                names.append(f"b{m}_{i + 1}")
        return names

    def resolve(self, name: str) -> ParameterRef:
        ref = ParameterRef.parse(name)
        if not 0 <= ref.layer < len(self.layers):
            raise ConfigError(f"{name}: network has {len(self.layers)} layers")
        layer = self.layers[ref.layer]
        if not 0 <= ref.row < layer.out_width or (
            ref.kind == "w" and not 0 <= ref.col < layer.in_width
        ):
            raise ConfigError(
                f"{name}: layer {ref.layer + 1} is {layer.out_width}x{layer.in_width}"
            )
        return ref

    def parameter(self, name: str) -> float:
        ref = self.resolve(name)
        layer = self.layers[ref.layer]
        if ref.kind == "w":
            return float(layer.weights[ref.row, ref.col])
        return float(layer.biases[ref.row])

    def with_parameters(self, values: Mapping[str, float]) -> "Mlp":
        """Copy of the network with the named entries replaced."""
        weights = [w.copy() for w in self.weights]
        biases = [b.copy() for b in self.biases]
        for name, value in values.items():
            ref = self.resolve(name)
            if ref.kind == "w":
                weights[ref.layer][ref.row, ref.col] = value
            else:
                biases[ref.layer][ref.row] = value
        return self.with_arrays(weights, biases)

    def with_arrays(self, weights: Sequence[np.ndarray], biases: Sequence[np.ndarray]) -> "Mlp":
        layers = tuple(
            LayerParams(w, b, layer.activation)
            for w, b, layer in zip(weights, biases, self.layers)
        )
        return Mlp(layers, self.input_width)


@dataclass(frozen=True)
class ForwardTrace:
    """
    Net inputs g^m and outputs β^m of every layer for one forward pass.

    Arrays carry an optional leading sample axis; `outputs[m - 1]` is β^m and
    `layer_input(m)` is β^(m-1), with β^0 the network input.
    """

    inputs: np.ndarray
    net_inputs: Tuple[np.ndarray, ...]
    outputs: Tuple[np.ndarray, ...]

    @property
    def output(self) -> np.ndarray:
        return self.outputs[-1]

    def layer_input(self, m: int) -> np.ndarray:
        return self.inputs if m == 1 else self.outputs[m - 2]


def forward(mlp: Mlp, p) -> ForwardTrace:
    """
    Propagate p (width R, or samples x R) through every layer.

    Raises:
        ShapeError: p does not have width R
    """
    beta = np.asarray(p, dtype=float)
    if beta.ndim not in (1, 2) or beta.shape[-1] != mlp.input_width:
        raise ShapeError(f"input of shape {beta.shape} does not match width {mlp.input_width}")
    inputs = beta
    net_inputs = []
    outputs = []
    for layer in mlp.layers:
        g = beta @ layer.weights.T + layer.biases
        beta = activation_derivatives(layer.activation, g)[0]
        net_inputs.append(g)
        outputs.append(beta)
    return ForwardTrace(inputs, tuple(net_inputs), tuple(outputs))


def squared_error(output, target) -> np.ndarray:
    """Σ_j (q_j - β_j)² over the last axis."""
    output = np.asarray(output, dtype=float)
    target = np.asarray(target, dtype=float)
    if output.shape != target.shape:
        raise ShapeError(f"output {output.shape} and target {target.shape} differ")
    residual = target - output
    result = np.sum(residual * residual, axis=-1)
    return float(result) if result.ndim == 0 else result


@dataclass(frozen=True)
class Dataset:
    """Input rows (S x R) paired with target rows (S x ψ^M)."""

    inputs: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        inputs = _readonly(self.inputs, 2, "dataset inputs")
        targets = _readonly(self.targets, 2, "dataset targets")
        if inputs.shape[0] == 0:
            raise ShapeError("dataset is empty")
        if inputs.shape[0] != targets.shape[0]:
            raise ShapeError(
                f"{inputs.shape[0]} inputs for {targets.shape[0]} targets"
            )
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "targets", targets)

    @classmethod
    def from_pairs(cls, pairs: Iterable) -> "Dataset":
        pairs = list(pairs)
        if not pairs:
            raise ShapeError("dataset is empty")
        inputs = [np.atleast_1d(np.asarray(p, dtype=float)) for p, _ in pairs]
        targets = [np.atleast_1d(np.asarray(q, dtype=float)) for _, q in pairs]
        if len({x.shape for x in inputs}) != 1 or len({y.shape for y in targets}) != 1:
            raise ShapeError("dataset rows have inconsistent widths")
        return cls(np.vstack(inputs), np.vstack(targets))

    @classmethod
    def generated_by(cls, mlp: Mlp, inputs) -> "Dataset":
        """Targets produced by the network itself."""
        inputs = np.asarray(inputs, dtype=float)
        if inputs.ndim == 1:
            inputs = inputs.reshape(-1, mlp.input_width)
        return cls(inputs, forward(mlp, inputs).output)

    def __len__(self) -> int:
        return self.inputs.shape[0]

    @property
    def input_width(self) -> int:
        return self.inputs.shape[1]

    @property
    def target_width(self) -> int:
        return self.targets.shape[1]

    def check_against(self, mlp: Mlp) -> None:
        if self.input_width != mlp.input_width or self.target_width != mlp.output_width:
            raise ShapeError(
                f"dataset widths ({self.input_width}, {self.target_width}) do not match "
                f"network ({mlp.input_width}, {mlp.output_width})"
            )

    def sample(self, index: int) -> "Dataset":
        return Dataset(self.inputs[index:index + 1], self.targets[index:index + 1])


def mean_squared_error(mlp: Mlp, data: Dataset) -> float:
    """Average over samples of the per-sample squared error."""
    data.check_against(mlp)
    errors = squared_error(forward(mlp, data.inputs).output, data.targets)
    return float(np.mean(errors))
