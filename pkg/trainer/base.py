"""Step-rule contract shared by the classic and fractional update rules."""
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Iterable, List, NamedTuple, Optional, Tuple

import numpy as np

from network.mlp import Dataset, ForwardTrace, Mlp, forward, squared_error
from network.sensitivity import SensitivityStack, sensitivities
from numerics.errors import NumericError


class LayerArrays(NamedTuple):
    """One array per layer shaped like the weights, one like the biases."""

    weights: List[np.ndarray]
    biases: List[np.ndarray]

    def value(self, mlp: Mlp, name: str) -> float:
        ref = mlp.resolve(name)
        if ref.kind == "w":
            return float(self.weights[ref.layer][ref.row, ref.col])
        return float(self.biases[ref.layer][ref.row])

    def items(self) -> Iterable[Tuple[str, int, Tuple[int, ...], np.ndarray]]:
        for m, array in enumerate(self.weights):
            yield "w", m, array.shape, array
        for m, array in enumerate(self.biases):
            yield "b", m, array.shape, array


def _name(kind: str, layer: int, index: Tuple[int, ...]) -> str:
    return f"{kind}{layer + 1}_" + "_".join(str(i + 1) for i in index)


@dataclass(frozen=True)
class ParameterMask:
    """Boolean trainable flags, laid out like the network's arrays."""

    weights: Tuple[np.ndarray, ...]
    biases: Tuple[np.ndarray, ...]

    @classmethod
    def from_names(cls, mlp: Mlp, names: Optional[Iterable[str]] = None) -> "ParameterMask":
        """All parameters when names is None, otherwise exactly the named ones."""
        if names is None:
            return cls(
                tuple(np.ones(w.shape, dtype=bool) for w in mlp.weights),
                tuple(np.ones(b.shape, dtype=bool) for b in mlp.biases),
            )
        weights = [np.zeros(w.shape, dtype=bool) for w in mlp.weights]
        biases = [np.zeros(b.shape, dtype=bool) for b in mlp.biases]
        for name in names:
            ref = mlp.resolve(name)
            if ref.kind == "w":
                weights[ref.layer][ref.row, ref.col] = True
            else:
                biases[ref.layer][ref.row] = True
        return cls(tuple(weights), tuple(biases))

    def count(self) -> int:
        return int(sum(w.sum() for w in self.weights) + sum(b.sum() for b in self.biases))

    def max_abs(self, arrays: LayerArrays) -> float:
        """Largest |entry| over trainable positions, 0 when nothing is trainable."""
        largest = 0.0
        for array, flags in zip(arrays.weights + arrays.biases, self.weights + self.biases):
            if flags.any():
                largest = max(largest, float(np.max(np.abs(array[flags]))))
        return largest


def derivative_terms(trace: ForwardTrace, rho: SensitivityStack, n: int) -> LayerArrays:
    """
    Sample means of ρ_n β^n (weights) and ρ_n (biases) for every layer.

    With n = 1 these are the gradients of the mean squared error.
    """
    weights, biases = [], []
    for m in range(1, rho.depth + 1):
        r = np.atleast_2d(rho.at(n, m))
        beta = np.atleast_2d(trace.layer_input(m))
        weights.append(np.mean(r[:, :, None] * beta[:, None, :] ** n, axis=0))
        biases.append(np.mean(r, axis=0))
    return LayerArrays(weights, biases)


@dataclass(frozen=True)
class BatchStatistics:
    """Everything a step needs from one forward/backward pass over a batch."""

    f_hat: float
    e_avg: float
    rho_output_avg: float
    terms: Tuple[LayerArrays, ...]
    trace: ForwardTrace
    rho: SensitivityStack

    def term(self, n: int) -> LayerArrays:
        return self.terms[n - 1]


def batch_statistics(mlp: Mlp, data: Dataset, n_max: int = 3) -> BatchStatistics:
    """
    Forward pass, sensitivities and their sample averages for the whole batch.

    Raises:
        NumericError: the error or a sensitivity is not finite
    """
    data.check_against(mlp)
    trace = forward(mlp, data.inputs)
    with np.errstate(over="ignore", invalid="ignore"):
        rho = sensitivities(mlp, trace, data.targets)
        f_hat = float(np.mean(squared_error(trace.output, data.targets)))
        terms = tuple(derivative_terms(trace, rho, n) for n in range(1, n_max + 1))
    if not np.isfinite(f_hat):
        raise NumericError(f"squared error is not finite ({f_hat})")
    if not rho.is_finite():
        raise NumericError("sensitivities are not finite")
    return BatchStatistics(
        f_hat=f_hat,
        e_avg=float(np.mean(data.targets - trace.output)),
        rho_output_avg=float(np.mean(rho.at(1, rho.depth))),
        terms=terms,
        trace=trace,
        rho=rho,
    )


class BaseStepRule(ABC):
    """
    Abstract update rule x <- x - μ · partial(x) over the trainable entries.

    Subclasses provide the partials; `apply` owns masking, the finiteness
    check and the optional post-step constraint.
    """

    order_terms: int = 1

    def __init__(self, learning_rate: float, mask: ParameterMask):
        self.learning_rate = float(learning_rate)
        self.mask = mask

    @abstractmethod
    def partials(self, mlp: Mlp, stats: BatchStatistics, v: float) -> LayerArrays:
        """Per-parameter derivative used by the step."""
        pass

    def constrain(self, kind: str, layer: int, values: np.ndarray, flags: np.ndarray) -> np.ndarray:
        """Hook applied to the updated arrays; identity by default."""
        return values

    def constrain_network(self, mlp: Mlp) -> Mlp:
        """`constrain` over every array of mlp, for changes made outside `apply`."""
        weights = [self.constrain("w", m, w, f) for m, (w, f) in enumerate(zip(mlp.weights, self.mask.weights))]
        biases = [self.constrain("b", m, b, f) for m, (b, f) in enumerate(zip(mlp.biases, self.mask.biases))]
        return mlp.with_arrays(weights, biases)

    def apply(
        self,
        mlp: Mlp,
        stats: BatchStatistics,
        v: float,
        partials: Optional[LayerArrays] = None,
    ) -> Mlp:
        """
        One update of every trainable parameter.

        Raises:
            NumericError: a trainable partial or updated value is not finite
        """
        if partials is None:
            partials = self.partials(mlp, stats, v)
        updated = {"w": [], "b": []}
        flags_by_kind = {"w": self.mask.weights, "b": self.mask.biases}
        current = {"w": mlp.weights, "b": mlp.biases}
        for kind, m, _, partial in partials.items():
            flags = flags_by_kind[kind][m]
            values = current[kind][m]
            with np.errstate(over="ignore", invalid="ignore"):
                stepped = values - self.learning_rate * partial
            bad = flags & ~np.isfinite(stepped)
            if bad.any():
                index = tuple(int(i) for i in np.argwhere(bad)[0])
                name = _name(kind, m, index)
                raise NumericError(
                    f"non-finite update for {name} (partial {partial[index]!r})",
                    parameter=name,
                )
            stepped = np.where(flags, stepped, values)
            updated[kind].append(self.constrain(kind, m, stepped, flags))
        return mlp.with_arrays(updated["w"], updated["b"])
