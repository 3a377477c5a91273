"""Special-function and fractional-calculus primitives.

Gamma and reciprocal gamma, the generalized binomial coefficient, the signed
power terms used by the fractional partials, and a numeric Grünwald-Letnikov
derivative that serves as an oracle for the trainer.
"""
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from numerics.errors import DomainError, NumericError, PreconditionError


# Lanczos approximation, g = 7, nine coefficients.
_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_TWO_PI = math.sqrt(2.0 * math.pi)

# Largest argument whose gamma value is a finite double.
_GAMMA_MAX_ARG = 171.6
_FACTORIAL_LIMIT = 171


def _is_pole(x: float) -> bool:
    return x <= 0.0 and float(x).is_integer()


def _sin_pi(x: float) -> float:
    """sin(pi * x) with the argument reduced to [-0.5, 0.5] first."""
    n = round(x)
    r = x - n
    value = math.sin(math.pi * r)
    return -value if n % 2 else value


def _lanczos(x: float) -> float:
    z = x - 1.0
    acc = _LANCZOS_COEFFS[0]
    for i, coeff in enumerate(_LANCZOS_COEFFS[1:], start=1):
        acc += coeff / (z + i)
    t = z + _LANCZOS_G + 0.5
    # t ** (z + 0.5) split in two halves so it does not overflow before gamma does
    half = t ** ((z + 0.5) / 2.0)
    return _SQRT_TWO_PI * half * (half * math.exp(-t)) * acc


def gamma(x: float) -> float:
    """
    Gamma function for real arguments.

    Exact factorials at positive integers, Lanczos for x >= 0.5 and the
    reflection formula below that.

    Raises:
        DomainError: x is a pole (0, -1, -2, ...) or not finite
        NumericError: the result overflows a double
    """
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"gamma argument must be finite, got {x}")
    if _is_pole(x):
        raise DomainError(f"gamma has a pole at x = {x:g}")
    if x.is_integer() and x <= _FACTORIAL_LIMIT:
        return float(math.factorial(int(x) - 1))
    if x > _GAMMA_MAX_ARG:
        raise NumericError(f"gamma({x:g}) overflows")
    if x < 0.5:
        if 1.0 - x > _GAMMA_MAX_ARG:
            return 0.0
        return math.pi / (_sin_pi(x) * gamma(1.0 - x))
    return _lanczos(x)


def rgamma(x: float) -> float:
    """Reciprocal gamma 1/gamma(x), which is 0 at the poles of gamma."""
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"rgamma argument must be finite, got {x}")
    if _is_pole(x) or x > _GAMMA_MAX_ARG:
        return 0.0
    return 1.0 / gamma(x)


def frac_binomial(v: float, n: int) -> float:
    """
    Generalized binomial coefficient C(v, n) by the falling-factorial product.

    The product form stays finite at integer v where the gamma-ratio form has
    poles, and C(m, n) is exactly 0 for integers 0 <= m < n.
    """
    if n < 0:
        raise PreconditionError(f"binomial index must be >= 0, got {n}")
    result = 1.0
    for k in range(n):
        result *= (v - k) / (k + 1)
    return result


def power_term(base: float, exponent: float) -> float:
    """base ** exponent computed as exp(exponent * ln(base)) for base > 0."""
    if not base > 0.0:
        raise DomainError(f"parameter at or below its lower bound (distance {base:g})")
    return math.exp(exponent * math.log(base))


def power_terms(base: np.ndarray, exponent: float) -> np.ndarray:
    """Elementwise power_term over an array of distances."""
    base = np.asarray(base, dtype=float)
    if np.any(~(base > 0.0)):
        raise DomainError(
            f"parameter at or below its lower bound (min distance {np.min(base):g})"
        )
    return np.exp(exponent * np.log(base))


@dataclass(frozen=True)
class GlGridSpec:
    """Interval [lower_bound, evaluation_point] split into `partitions` steps."""

    lower_bound: float
    evaluation_point: float
    partitions: int

    def __post_init__(self):
        if not self.evaluation_point > self.lower_bound:
            raise PreconditionError(
                f"evaluation point {self.evaluation_point} must exceed "
                f"lower bound {self.lower_bound}"
            )
        if int(self.partitions) != self.partitions or self.partitions < 2:
            raise PreconditionError(f"partitions must be an integer >= 2, got {self.partitions}")
        object.__setattr__(self, "partitions", int(self.partitions))

    @property
    def step(self) -> float:
        return (self.evaluation_point - self.lower_bound) / self.partitions


def _sample(f: Callable, points: np.ndarray) -> np.ndarray:
    """Evaluate f on all points, vectorised when f accepts arrays."""
    try:
        values = np.asarray(f(points), dtype=float)
    except (TypeError, ValueError):
        values = None
    if values is None or values.shape not in (points.shape, ()):
        values = np.fromiter((f(float(p)) for p in points), dtype=float, count=points.size)
    return np.broadcast_to(values, points.shape)


def gl_coefficients(v: float, count: int) -> np.ndarray:
    """First `count` Grünwald-Letnikov weights Γ(k-v) / (Γ(-v) Γ(k+1))."""
    coeffs = np.empty(count)
    coeffs[0] = 1.0
    if count > 1:
        k = np.arange(1, count, dtype=float)
        coeffs[1:] = np.cumprod((k - 1.0 - v) / k)
    return coeffs


def gl_derivative_numeric(f: Callable, grid: GlGridSpec, v: float) -> float:
    """
    Grünwald-Letnikov derivative of order v of f at grid.evaluation_point.

    Non-negative integer orders fall back to the classical backward finite
    difference of that order on the same step; order 0 returns f(x).

    Raises:
        DomainError: v is not finite
        PreconditionError: integer order needs more points than the grid has
        NumericError: the weighted sum overflows
    """
    v = float(v)
    if not math.isfinite(v):
        raise DomainError(f"order must be finite, got {v}")

    x = grid.evaluation_point
    h = grid.step

    if v >= 0.0 and v.is_integer():
        order = int(v)
        if order == 0:
            return float(f(x))
        if order >= grid.partitions:
            raise PreconditionError(
                f"order {order} needs more than {grid.partitions} partitions"
            )
        coeffs = np.array([(-1.0) ** k * frac_binomial(order, k) for k in range(order + 1)])
        count = order + 1
    else:
        coeffs = gl_coefficients(v, grid.partitions)
        count = grid.partitions

    points = x - np.arange(count, dtype=float) * h
    values = _sample(f, points)
    try:
        with np.errstate(over="raise", invalid="raise"):
            total = float(np.dot(coeffs, values)) * h ** (-v)
    except FloatingPointError as e:
        raise NumericError(f"Grünwald-Letnikov sum failed: {e}") from e
    if not math.isfinite(total):
        raise NumericError(f"Grünwald-Letnikov sum is not finite ({total})")
    return total
