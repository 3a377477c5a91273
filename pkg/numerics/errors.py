"""Exception hierarchy shared by every package."""
from typing import Optional


class FbpnnError(Exception):
    """Base class for all errors raised by this project."""
    pass


class DomainError(FbpnnError, ValueError):
    """Argument outside the mathematical domain (gamma poles, lower bounds)."""
    pass


class ShapeError(FbpnnError, ValueError):
    """Vector or matrix dimensions do not line up."""
    pass


class PreconditionError(FbpnnError, ValueError):
    """An operation was called with inputs its contract rules out."""
    pass


class ConfigError(FbpnnError):
    """Invalid configuration, identifier or schema violation."""
    pass


class NumericError(FbpnnError, ArithmeticError):
    """A computation produced a non-finite value."""

    def __init__(self, message: str, parameter: Optional[str] = None):
        super().__init__(message)
        self.parameter = parameter
