"""Adaptive fractional order and the order-regime bounds."""
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from network.mlp import ForwardTrace, Mlp
from network.sensitivity import SensitivityStack
from numerics.errors import DomainError, PreconditionError
from numerics.frac_core import gamma
from trainer.base import ParameterMask, derivative_terms


def adaptive_order(e_avg: float, rho_output_avg: float, epsilon_phi: float) -> float:
    """
    Order for the next iteration from the average output error and sensitivity.

    With Φ = max(|ρ|, ε)^(2 + e) the kernel is 2·|(1 - Φ^-e) / (1 + Φ^-e)| + |e|.
    The ratio equals -tanh(-e·lnΦ / 2), which is evaluated instead so large
    exponents do not overflow.
    """
    if not (math.isfinite(e_avg) and math.isfinite(rho_output_avg)):
        raise DomainError(f"kernel inputs must be finite, got e={e_avg}, rho={rho_output_avg}")
    if not epsilon_phi > 0.0:
        raise PreconditionError(f"epsilon_phi must be positive, got {epsilon_phi}")
    log_phi = (2.0 + e_avg) * math.log(max(abs(rho_output_avg), epsilon_phi))
    return 2.0 * abs(math.tanh(e_avg * log_phi / 2.0)) + abs(e_avg)


def kernel_curve(e_values, epsilon_phi: float = 1e-12) -> np.ndarray:
    """
    (e, v) rows of the kernel for a single log-sigmoid output neuron.

    Assumes β = 1 + e with unit upstream input, weight and bias, so that
    ρ = -2e·β(1 - β).
    """
    e_values = np.asarray(e_values, dtype=float).reshape(-1)
    rows = np.empty((e_values.size, 2))
    for k, e in enumerate(e_values):
        beta = 1.0 + e
        rho = -2.0 * e * beta * (1.0 - beta)
        rows[k] = e, adaptive_order(float(e), float(rho), epsilon_phi)
    return rows


@dataclass(frozen=True)
class OrderBounds:
    """
    Order thresholds derived from the fractional partials' series sums.

    v_T3 / v_T4 are None unless strictly inside (1, 2); the σ² pair is None
    when no threshold differs from 1.
    """

    v_t1: float
    v_t2: float
    v_t3: Optional[float]
    v_t4: Optional[float]
    sigma_l_sq: Optional[float]
    sigma_u_sq: Optional[float]
    s_w: float
    s_b: float


def _series_sum(values: np.ndarray, bound: float, terms, flags: np.ndarray) -> float:
    if not flags.any():
        return 0.0
    d = values[flags] - bound
    total = np.zeros_like(d)
    for n, term in enumerate(terms, start=1):
        total = total + np.abs(d ** n * term[flags]) / gamma(n)
    return float(np.max(total))


def _upper_threshold(ratio: float) -> Optional[float]:
    if ratio >= 1.0:
        return None
    value = -1.0 / (ratio - 1.0)
    return value if 1.0 < value < 2.0 else None


def order_bounds(
    mlp: Mlp,
    trace: ForwardTrace,
    rho: SensitivityStack,
    f_hat: float,
    w_inf: float,
    b_inf: float,
    mask: Optional[ParameterMask] = None,
    v: Optional[float] = None,
) -> OrderBounds:
    """
    Thresholds v_T1..v_T4 and σ_L², σ_U² at the current state.

    Per parameter S = Σ_{n=1..3} |(x - x_inf)^n ρ_n β^n| / Γ(n); the bound
    uses the largest S over trainable weights (S_w) and biases (S_b).

    Raises:
        PreconditionError: f_hat <= 0
    """
    if not f_hat > 0.0:
        raise PreconditionError(f"order bounds need F̂ > 0, got {f_hat}")
    if mask is None:
        mask = ParameterMask.from_names(mlp)
    terms = [derivative_terms(trace, rho, n) for n in (1, 2, 3)]
    s_w = max(
        _series_sum(mlp.weights[m], w_inf, [t.weights[m] for t in terms], mask.weights[m])
        for m in range(len(mlp.layers))
    )
    s_b = max(
        _series_sum(mlp.biases[m], b_inf, [t.biases[m] for t in terms], mask.biases[m])
        for m in range(len(mlp.layers))
    )
    ratio_w, ratio_b = s_w / f_hat, s_b / f_hat
    v_t1 = 1.0 / (ratio_w + 1.0)
    v_t2 = 1.0 / (ratio_b + 1.0)

    candidates = [(v_t1, s_w), (v_t2, s_b)]
    if v is not None:
        candidates += [(v, s_w), (v, s_b)]
    sigmas = [abs(u / (1.0 - u)) * s for u, s in candidates if u != 1.0 and s > 0.0]
    return OrderBounds(
        v_t1=v_t1,
        v_t2=v_t2,
        v_t3=_upper_threshold(ratio_w),
        v_t4=_upper_threshold(ratio_b),
        sigma_l_sq=min(sigmas) if sigmas else None,
        sigma_u_sq=max(sigmas) if sigmas else None,
        s_w=s_w,
        s_b=s_b,
    )
