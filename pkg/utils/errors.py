# utils/errors.py - Exception hierarchy shared by all qednp modules
from typing import Optional


class QednpError(Exception):
    """Base class for every error raised by qednp"""


class UnitError(QednpError, ValueError):
    """Unsupported unit, unit pair or malformed quantity"""


class DomainError(QednpError, ValueError):
    """Argument outside the domain where the quantity is defined"""


class DegenerateInput(QednpError, ValueError):
    """Input for which the requested quantity is undefined (e.g. all rates zero)"""


class ConfigError(QednpError, ValueError):
    """
    Problem in a scenario file

    Args:
        message: Human readable description
        lineno: 1-based line number in the scenario text, if known
    """
    def __init__(self, message: str, lineno: Optional[int] = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class PlotError(QednpError):
    """Plot input is missing or unusable"""


class NumericError(QednpError):
    """A numerical procedure failed"""


class StepSizeError(NumericError):
    """Time stepper became unstable or broke a physical invariant"""


class FitError(NumericError):
    """
    Least-squares fit did not converge

    Args:
        message: Human readable description
        residual: Best cost reached before giving up
    """
    def __init__(self, message: str, residual: Optional[float] = None):
        self.residual = residual
        if residual is not None:
            message = f"{message} (best residual {residual:.6g})"
        super().__init__(message)


class ModelError(NumericError):
    """Model assumption violated by the given input"""
