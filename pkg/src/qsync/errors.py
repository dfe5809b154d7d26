"""Exception hierarchy used across the package."""


class QsyncError(Exception):
    """Base class for all package errors."""


class ValidationError(QsyncError):
    """A state or matrix failed its physicality checks."""


class ArgumentError(QsyncError, ValueError):
    """An argument is outside the domain of the operation."""


class WindowRangeError(QsyncError):
    """A sliding window does not fit inside the trajectory."""


class DegenerateSignalError(QsyncError):
    """A windowed signal has zero variance, so a correlation is undefined."""


class DegenerateStateError(QsyncError):
    """A state quantity required to be nonzero vanishes (for example a mode occupation)."""


class UndefinedPhaseError(QsyncError):
    """Mean-field amplitude too small for a well-defined phase."""


class InternalConsistencyError(QsyncError):
    """A quantity violated a bound that holds for every valid input."""


class UnstableNetworkError(QsyncError):
    """Oscillator network potential is not positive definite."""


class DegeneracyError(QsyncError):
    """Spin quasi-energies degenerate; the secular construction refuses."""


class ConfigError(QsyncError):
    """Bad run configuration (step size, schema, missing block)."""


class InstabilityError(QsyncError):
    """Numerical blow-up during integration."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class IntegrationAccuracyError(QsyncError):
    """Integrator output failed state validation."""
