"""
n-order sensitivities ρ_n^m = D^n_{g^m} F̂ for n = 1..3.

Output-layer seeds are the exact derivatives of Σ(q - β)² with respect to the
output net inputs. The backward recurrence raises each per-path factor
w^{m+1}_{i,j} f^m'(g_j^m) to the n-th power and sums over downstream neurons;
for n >= 2 it is a diagonal approximation (mixed partials across neurons and
the f'' curvature of hidden layers are not carried).
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from network.mlp import ActivationKind, ForwardTrace, Mlp, activation_derivatives
from numerics.errors import ShapeError

ORDERS = (1, 2, 3)

Seeds = Tuple[np.ndarray, np.ndarray, np.ndarray]


@dataclass(frozen=True)
class SensitivityStack:
    """rho[n - 1][m - 1] holds ρ_n for every neuron of layer m."""

    rho: Tuple[Tuple[np.ndarray, ...], ...]

    def at(self, n: int, m: int) -> np.ndarray:
        return self.rho[n - 1][m - 1]

    @property
    def depth(self) -> int:
        return len(self.rho[0])

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(layer)) for order in self.rho for layer in order)


def output_sensitivities(trace: ForwardTrace, target, activation: ActivationKind) -> Seeds:
    """Seeds ρ_1, ρ_2, ρ_3 of the output layer."""
    target = np.asarray(target, dtype=float)
    beta = trace.output
    if target.shape != beta.shape:
        raise ShapeError(f"target {target.shape} does not match output {beta.shape}")
    _, d1, d2, d3 = activation_derivatives(activation, trace.net_inputs[-1])
    residual = target - beta
    rho1 = -2.0 * residual * d1
    rho2 = -2.0 * (residual * d2 - d1 * d1)
    rho3 = -2.0 * (residual * d3 - 3.0 * d1 * d2)
    return rho1, rho2, rho3


def backprop_sensitivities(mlp: Mlp, trace: ForwardTrace, seeds: Seeds) -> SensitivityStack:
    """Carry the seeds from layer M back to layer 1."""
    depth = len(mlp.layers)
    if len(trace.net_inputs) != depth:
        raise ShapeError(f"trace has {len(trace.net_inputs)} layers, network has {depth}")
    per_order = []
    for n, seed in zip(ORDERS, seeds):
        if seed.shape != trace.output.shape:
            raise ShapeError(f"seed {seed.shape} does not match output {trace.output.shape}")
        layers = [None] * depth
        layers[-1] = seed
        for m in range(depth - 2, -1, -1):
            downstream = mlp.layers[m + 1].weights
            slope = activation_derivatives(mlp.layers[m].activation, trace.net_inputs[m])[1]
            layers[m] = (layers[m + 1] @ downstream ** n) * slope ** n
        per_order.append(tuple(layers))
    return SensitivityStack(tuple(per_order))


def sensitivities(mlp: Mlp, trace: ForwardTrace, target) -> SensitivityStack:
    seeds = output_sensitivities(trace, target, mlp.layers[-1].activation)
    return backprop_sensitivities(mlp, trace, seeds)
