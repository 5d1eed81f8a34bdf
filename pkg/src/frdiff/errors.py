"""Exception hierarchy shared by all frdiff modules."""

from __future__ import annotations


class FrdiffError(Exception):
    """Base class for every error raised by the package."""


class ParameterError(FrdiffError, ValueError):
    """A parameter violates a documented constraint."""


class FamilyError(ParameterError):
    """Time orders are not both in (1, 2] or both in (0, 1]."""


class ConvergenceError(FrdiffError, ArithmeticError):
    """A series or iterative procedure stopped before reaching its tolerance."""


class QuadratureError(ConvergenceError):
    """Numerical integration could not meet its error target."""


class TailError(QuadratureError):
    """The truncated Fourier tail is larger than the configured bound."""

    def __init__(self, message: str, tail: float):
        super().__init__(message)
        self.tail = tail


class RealnessError(FrdiffError):
    """The inverse transform has an imaginary part above the realness tolerance."""


class StabilityError(FrdiffError):
    """A finite-difference scheme was asked to run outside its stability region."""


class ConfigError(FrdiffError, ValueError):
    """Invalid run configuration. Carries the offending key and line if known."""

    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        where = []
        if key is not None:
            where.append(f"key '{key}'")
        if line is not None:
            where.append(f"line {line}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.key = key
        self.line = line
