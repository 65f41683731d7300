"""Exception types shared across the package."""


class EITError(Exception):
    """Base class for all package errors."""


class DomainError(EITError, ValueError):
    """Raised when an input lies outside the mathematical domain of an operation."""


class NumericalError(EITError, ArithmeticError):
    """Raised when a numerical procedure fails (no bracket, no convergence, singular system)."""


class ConvergenceError(NumericalError):
    pass


class FlatCurveError(NumericalError):
    """The transmittance curve carries no measurable plateau/peak structure."""


class ConfigError(EITError, ValueError):
    """Invalid run configuration."""

    def __init__(self, message, *, section=None, key=None, line=None):
        where = []
        if section is not None:
            where.append(f"[{section}]")
        if key is not None:
            where.append(key)
        if line is not None:
            where.append(f"line {line}")
        prefix = " ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)
        self.section = section
        self.key = key
        self.line = line
