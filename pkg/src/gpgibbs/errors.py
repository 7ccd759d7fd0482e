"""Exception types shared across the package."""


class GpGibbsError(Exception):
    """Base class for all package errors."""


class ParameterError(GpGibbsError, ValueError):
    """Invalid argument or configuration value."""


class DiagnosticError(GpGibbsError, RuntimeError):
    """A computation ran but its health checks failed (variance blow-up,
    effective sample size collapse, coercivity violation, ...)."""


class ConvergenceError(DiagnosticError):
    """An iterative solver did not reach its tolerance.

    Carries the best iterate found so that callers can inspect it.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class CalibrationError(DiagnosticError):
    """No value on the calibration grid satisfied the requirement."""
