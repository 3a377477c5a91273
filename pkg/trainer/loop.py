"""Training loop: order schedule, convergence and saddle handling, trace."""
from enum import Enum
from typing import Iterable, Tuple, Union

import numpy as np
from loguru import logger

from network.mlp import Dataset, Mlp
from numerics.errors import DomainError, NumericError
from trainer.base import BaseStepRule, BatchStatistics, LayerArrays, ParameterMask, batch_statistics
from trainer.order import adaptive_order
from trainer.rules import build_rule, resolve_bounds
from trainer.schemas import AdaptiveKernel, TraceRow, TrainerConfig, TrainTrace


class ConvergenceState(str, Enum):
    CONVERGED = "converged"
    SADDLE = "saddle"
    CONTINUE = "continue"


def convergence_check(
    partials: Union[LayerArrays, Iterable[np.ndarray]],
    f_hat: float,
    stop_tolerance: float,
    saddle_epsilon: float,
) -> ConvergenceState:
    """Classify the state from the largest |partial| and the error."""
    if isinstance(partials, LayerArrays):
        arrays = list(partials.weights) + list(partials.biases)
    else:
        arrays = [np.asarray(p, dtype=float) for p in partials]
    largest = max((float(np.max(np.abs(a))) for a in arrays if np.size(a)), default=0.0)
    if largest > saddle_epsilon:
        return ConvergenceState.CONTINUE
    if f_hat <= stop_tolerance:
        return ConvergenceState.CONVERGED
    return ConvergenceState.SADDLE


def current_order(config: TrainerConfig, stats: BatchStatistics) -> float:
    if config.mode == "classic":
        return 1.0
    policy = config.order_policy
    if isinstance(policy, AdaptiveKernel):
        return adaptive_order(stats.e_avg, stats.rho_output_avg, policy.epsilon_phi)
    return policy.value


def perturb(mlp: Mlp, mask: ParameterMask, rng: np.random.Generator, scale: float) -> Mlp:
    """Add uniform noise in [-scale, scale] to every trainable entry."""
    weights = [
        np.where(flags, w + rng.uniform(-scale, scale, size=w.shape), w)
        for w, flags in zip(mlp.weights, mask.weights)
    ]
    biases = [
        np.where(flags, b + rng.uniform(-scale, scale, size=b.shape), b)
        for b, flags in zip(mlp.biases, mask.biases)
    ]
    return mlp.with_arrays(weights, biases)


def _masked(partials: LayerArrays, mask: ParameterMask) -> LayerArrays:
    return LayerArrays(
        [np.where(f, p, 0.0) for p, f in zip(partials.weights, mask.weights)],
        [np.where(f, p, 0.0) for p, f in zip(partials.biases, mask.biases)],
    )


def _check_start(mlp: Mlp, mask: ParameterMask, config: TrainerConfig) -> None:
    if config.mode != "fsdm":
        return
    w_inf, b_inf = resolve_bounds(mlp, config)
    for m in range(len(mlp.layers)):
        if np.any(mask.weights[m] & ~(mlp.weights[m] > w_inf)):
            raise DomainError(f"layer {m + 1} has a trainable weight at or below w_inf = {w_inf:g}")
        if np.any(mask.biases[m] & ~(mlp.biases[m] > b_inf)):
            raise DomainError(f"layer {m + 1} has a trainable bias at or below b_inf = {b_inf:g}")


def _sweep_samples(
    mlp: Mlp, data: Dataset, rule: BaseStepRule, config: TrainerConfig
) -> Mlp:
    for index in range(len(data)):
        stats = batch_statistics(mlp, data.sample(index), rule.order_terms)
        mlp = rule.apply(mlp, stats, current_order(config, stats))
    return mlp


def train(mlp: Mlp, data: Dataset, config: TrainerConfig) -> Tuple[Mlp, TrainTrace]:
    """
    Run up to max_iterations steps and record one trace row per iteration.

    Each row holds the state at the start of its iteration. A saddle (all
    partials vanish with F̂ above the stop tolerance) is left by a seeded
    random perturbation of the trainable parameters, kept above the fsdm
    lower bounds by the same clamp as a regular step. Numeric or domain
    failures inside the loop end the run with status "aborted" and the trace
    collected so far.

    Raises:
        DomainError: fsdm mode and a trainable parameter starts at or below its bound
        ConfigError: unknown trainable or tracked parameter identifier
    """
    data.check_against(mlp)
    mask = ParameterMask.from_names(mlp, config.trainable)
    tracked = tuple(config.track)
    for name in tracked:
        mlp.resolve(name)
    _check_start(mlp, mask, config)

    rule = build_rule(mlp, config, mask)
    rng = np.random.default_rng(config.rng_seed)
    trace = TrainTrace(tracked=tracked)
    logger.info(
        f"Training started: mode={config.mode}, mu={config.learning_rate}, "
        f"iterations={config.max_iterations}, trainable={mask.count()}, batch={config.batch}"
    )

    try:
        for k in range(config.max_iterations):
            stats = batch_statistics(mlp, data, rule.order_terms)
            v = current_order(config, stats)
            partials = rule.partials(mlp, stats, v)
            state = convergence_check(
                _masked(partials, mask), stats.f_hat, config.stop_tolerance, config.saddle_epsilon
            )
            snapshot = tuple(mlp.parameter(name) for name in tracked)

            if state is ConvergenceState.CONVERGED:
                trace.append(TraceRow(k, stats.f_hat, v, snapshot))
                trace.status = "converged"
                logger.info(f"Converged at iteration {k}: F̂={stats.f_hat:.6g}")
                return mlp, trace

            if state is ConvergenceState.SADDLE:
                trace.append(TraceRow(k, stats.f_hat, v, snapshot, saddle_perturbed=True))
                logger.warning(
                    f"Saddle at iteration {k} (F̂={stats.f_hat:.6g}), "
                    f"perturbing by up to {config.perturbation_scale:g}"
                )
                mlp = rule.constrain_network(perturb(mlp, mask, rng, config.perturbation_scale))
                continue

            trace.append(TraceRow(k, stats.f_hat, v, snapshot))
            if k % config.log_every == 0:
                logger.debug(f"Iteration {k}: F̂={stats.f_hat:.6g}, v={v:.6g}")

            if config.batch == "per_sample":
                mlp = _sweep_samples(mlp, data, rule, config)
            else:
                mlp = rule.apply(mlp, stats, v, partials)
    except (NumericError, DomainError) as e:
        trace.status = "aborted"
        trace.message = str(e)
        logger.error(f"Training aborted after {len(trace)} iterations: {e}")
        return mlp, trace

    trace.status = "completed"
    last = trace.last
    logger.info(
        f"Training completed: {len(trace)} iterations, final F̂={last.f_hat:.6g}"
        if last else "Training completed"
    )
    return mlp, trace
