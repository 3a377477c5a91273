"""Hidden-layer width estimate."""
import math

from numerics.errors import DomainError, PreconditionError


def sizing_estimate(c: float, samples: float, inputs: int) -> int:
    """
    ceil(C * sqrt(S / (R * ln S))), at least 1.

    Args:
        c: nonnegative scale constant C
        samples: training sample count S >= 2
        inputs: input width R >= 1

    Raises:
        PreconditionError: S < 2 or R < 1
        DomainError: C negative or not finite
    """
    if samples < 2:
        raise PreconditionError(f"sizing needs at least 2 samples, got {samples}")
    if inputs < 1:
        raise PreconditionError(f"input width must be >= 1, got {inputs}")
    if not (math.isfinite(c) and c >= 0.0):
        raise DomainError(f"C must be finite and nonnegative, got {c}")
    width = math.ceil(c * math.sqrt(samples / (inputs * math.log(samples))))
    return max(1, width)
