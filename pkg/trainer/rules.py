"""
Classic first-order and fractional (FSDM) update rules.

The fractional partial of the squared error with respect to a parameter x
with lower bound a is approximated by the truncated series

    (x - a)^(-v) / Γ(1 - v) · F̂ + Σ_{n=1}^{n_max} C(v, n) (x - a)^(n - v) / Γ(n - v + 1) · ρ_n β^n

where β is the upstream output feeding a weight (1 for a bias). Every 1/Γ is
taken through rgamma so integer orders use their limits; at v = 1 the series
collapses to ρ_1 β, the classic gradient.
"""
from typing import Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from network.mlp import Dataset, ForwardTrace, Mlp
from network.sensitivity import SensitivityStack
from numerics.errors import DomainError, PreconditionError
from numerics.frac_core import frac_binomial, power_term, power_terms, rgamma
from trainer.base import (
    BaseStepRule,
    BatchStatistics,
    LayerArrays,
    ParameterMask,
    batch_statistics,
    derivative_terms,
)
from trainer.schemas import TrainerConfig


def classic_gradient(trace: ForwardTrace, rho: SensitivityStack) -> LayerArrays:
    """grad_w = ρ_1 β^(m-1) and grad_b = ρ_1, averaged over the samples in the trace."""
    return derivative_terms(trace, rho, 1)


def _series_coefficients(v: float, n_max: int) -> Tuple[float, ...]:
    return tuple(frac_binomial(v, n) * rgamma(n - v + 1.0) for n in range(1, n_max + 1))


def _check_order(v: float, n_max: int) -> None:
    if not np.isfinite(v) or v < 0.0:
        raise DomainError(f"fractional order must be finite and >= 0, got {v}")
    if n_max not in (1, 3):
        raise PreconditionError(f"n_max must be 1 or 3, got {n_max}")


def fractional_partial(
    param_value: float,
    lower_bound: float,
    f_hat: float,
    rho: Sequence[float],
    beta_upstream: float,
    v: float,
    n_max: int,
) -> float:
    """
    Approximate v-order partial of F̂ for one parameter.

    Args:
        rho: ρ_1..ρ_{n_max} of the neuron that owns the parameter
        beta_upstream: the input feeding a weight, 1.0 for a bias

    Raises:
        DomainError: param_value <= lower_bound, or v negative / not finite
    """
    _check_order(v, n_max)
    if len(rho) < n_max:
        raise PreconditionError(f"need {n_max} sensitivities, got {len(rho)}")
    d = param_value - lower_bound
    total = rgamma(1.0 - v) * power_term(d, -v) * f_hat
    for n, coeff in enumerate(_series_coefficients(v, n_max), start=1):
        total = total + coeff * power_term(d, n - v) * (rho[n - 1] * beta_upstream ** n)
    return total


def fractional_partials(
    values: np.ndarray,
    lower_bound: float,
    f_hat: float,
    terms: Sequence[np.ndarray],
    v: float,
    n_max: int,
) -> np.ndarray:
    """fractional_partial over an array of parameters sharing a lower bound.

    terms[n - 1] holds the averaged ρ_n β^n products for each entry.
    """
    _check_order(v, n_max)
    d = np.asarray(values, dtype=float) - lower_bound
    total = rgamma(1.0 - v) * power_terms(d, -v) * f_hat
    for n, coeff in enumerate(_series_coefficients(v, n_max), start=1):
        total = total + coeff * power_terms(d, n - v) * terms[n - 1]
    return total


class ClassicStepRule(BaseStepRule):
    """First-order back-propagation: partial = gradient of the mean squared error."""

    def partials(self, mlp: Mlp, stats: BatchStatistics, v: float = 1.0) -> LayerArrays:
        return stats.term(1)


class FsdmStepRule(BaseStepRule):
    """
    Fractional steepest descent with lower bounds and a clamp.

    An update that would land at or below the bound is clamped to
    bound + clamp_fraction · (anchor - bound), where the anchor is the
    parameter's value when the rule was created (the run's initial state).
    """

    def __init__(
        self,
        learning_rate: float,
        mask: ParameterMask,
        w_inf: float,
        b_inf: float,
        n_max: int = 3,
        clamp_fraction: float = 1e-6,
        anchors: Optional[Mlp] = None,
    ):
        super().__init__(learning_rate, mask)
        self.w_inf = float(w_inf)
        self.b_inf = float(b_inf)
        self.n_max = n_max
        self.order_terms = n_max
        self.clamp_fraction = clamp_fraction
        self.anchors = anchors
        self.clamped = 0

    def bound(self, kind: str) -> float:
        return self.w_inf if kind == "w" else self.b_inf

    def _distances_safe(self, values: np.ndarray, flags: np.ndarray, bound: float) -> np.ndarray:
        # frozen entries never move, give them a harmless distance above the bound
        return np.where(flags, values, bound + 1.0)

    def partials(self, mlp: Mlp, stats: BatchStatistics, v: float) -> LayerArrays:
        if len(stats.terms) < self.n_max:
            raise PreconditionError(
                f"statistics carry {len(stats.terms)} orders, rule needs {self.n_max}"
            )
        weights, biases = [], []
        for m in range(len(mlp.layers)):
            for kind, values, flags, out in (
                ("w", mlp.weights[m], self.mask.weights[m], weights),
                ("b", mlp.biases[m], self.mask.biases[m], biases),
            ):
                bound = self.bound(kind)
                terms = [
                    (stats.term(n).weights if kind == "w" else stats.term(n).biases)[m]
                    for n in range(1, self.n_max + 1)
                ]
                below = flags & ~(values > bound)
                if below.any():
                    index = tuple(int(i) for i in np.argwhere(below)[0])
                    raise DomainError(
                        f"{kind}{m + 1}_{'_'.join(str(i + 1) for i in index)} = "
                        f"{values[index]:g} is at or below its lower bound {bound:g}"
                    )
                safe = self._distances_safe(values, flags, bound)
                out.append(fractional_partials(safe, bound, stats.f_hat, terms, v, self.n_max))
        return LayerArrays(weights, biases)

    def constrain(self, kind: str, layer: int, values: np.ndarray, flags: np.ndarray) -> np.ndarray:
        bound = self.bound(kind)
        breached = flags & ~(values > bound)
        if not breached.any():
            return values
        if self.anchors is not None:
            anchor = (self.anchors.weights if kind == "w" else self.anchors.biases)[layer]
        else:
            anchor = np.maximum(values, bound + 1.0)
        margin = self.clamp_fraction * (anchor - bound)
        count = int(breached.sum())
        self.clamped += count
        logger.warning(f"Clamped {count} {kind}{layer + 1} entries to their lower bound margin")
        return np.where(breached, bound + margin, values)


def resolve_bounds(mlp: Mlp, config: TrainerConfig) -> Tuple[float, float]:
    """(w_inf, b_inf); unset bounds default to min(all parameters) - bound_offset."""
    floor = min(
        min(float(w.min()) for w in mlp.weights),
        min(float(b.min()) for b in mlp.biases),
    ) - config.bound_offset
    w_inf = floor if config.w_inf is None else config.w_inf
    b_inf = floor if config.b_inf is None else config.b_inf
    return w_inf, b_inf


def build_rule(
    mlp: Mlp,
    config: TrainerConfig,
    mask: Optional[ParameterMask] = None,
    anchors: Optional[Mlp] = None,
) -> BaseStepRule:
    """
    Step rule for the configured mode.

    Default bounds and the clamp anchor come from `anchors`, or from mlp when
    no anchor network is given.
    """
    anchors = anchors if anchors is not None else mlp
    if mask is None:
        mask = ParameterMask.from_names(mlp, config.trainable)
    if config.mode == "classic":
        return ClassicStepRule(config.learning_rate, mask)
    w_inf, b_inf = resolve_bounds(anchors, config)
    return FsdmStepRule(
        config.learning_rate,
        mask,
        w_inf,
        b_inf,
        n_max=config.n_max,
        clamp_fraction=config.clamp_fraction,
        anchors=anchors,
    )


def step_classic(mlp: Mlp, data: Dataset, config: TrainerConfig) -> Mlp:
    """One first-order step on the batch."""
    if config.mode != "classic":
        raise PreconditionError(f"step_classic needs mode 'classic', config has {config.mode!r}")
    stats = batch_statistics(mlp, data, 1)
    return build_rule(mlp, config).apply(mlp, stats, 1.0)


def step_fsdm(
    mlp: Mlp, data: Dataset, config: TrainerConfig, v_current: float, anchors: Optional[Mlp] = None
) -> Mlp:
    """
    One fractional step on the batch at order v_current.

    Without `anchors` the step is anchored at mlp itself: default bounds are
    min(mlp) - bound_offset and a clamped entry lands at
    bound + clamp_fraction · (current value - bound). Pass the run's initial
    network to reproduce the steps `train` takes.
    """
    if config.mode != "fsdm":
        raise PreconditionError(f"step_fsdm needs mode 'fsdm', config has {config.mode!r}")
    stats = batch_statistics(mlp, data, config.n_max)
    return build_rule(mlp, config, anchors=anchors).apply(mlp, stats, v_current)
