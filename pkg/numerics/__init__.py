# Numerics module
from .errors import (
    FbpnnError,
    DomainError,
    ShapeError,
    PreconditionError,
    ConfigError,
    NumericError,
)
from .frac_core import (
    GlGridSpec,
    gamma,
    rgamma,
    frac_binomial,
    power_term,
    power_terms,
    gl_coefficients,
    gl_derivative_numeric,
)

__all__ = [
    "FbpnnError",
    "DomainError",
    "ShapeError",
    "PreconditionError",
    "ConfigError",
    "NumericError",
    "GlGridSpec",
    "gamma",
    "rgamma",
    "frac_binomial",
    "power_term",
    "power_terms",
    "gl_coefficients",
    "gl_derivative_numeric",
]
