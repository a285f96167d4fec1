"""
Exception hierarchy for the gate simulator.

Every error raised on purpose by this package derives from GateSimError so the
command layer can map it onto an exit code.
"""


class GateSimError(Exception):
    """Base class for all simulator errors."""

    exit_code = 1


class ArgumentError(GateSimError, ValueError):
    """Invalid argument passed to a domain operation."""

    exit_code = 2


class IndexOutOfRange(ArgumentError, IndexError):
    """Ion index outside 0..n_ions-1."""


class ConfigurationError(GateSimError, ValueError):
    """Run configuration or integrator settings are unusable."""

    exit_code = 2

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key

    def __reduce__(self):
        return type(self), (self.args[0], self.key)


class TruncationError(ConfigurationError):
    """The truncated phonon space is too small for the requested state or expansion."""


class DressingFieldError(GateSimError, ZeroDivisionError):
    """A formula divides by the second dressing field's Rabi frequency and it vanishes."""

    exit_code = 2


class SingularityError(GateSimError, ZeroDivisionError):
    """Resonant drive (epsilon = 0): the phase-space loop never closes."""

    exit_code = 2


class NoSolutionError(GateSimError, ValueError):
    """No close-out time exists for the requested drive."""

    exit_code = 2


class IntegrationError(GateSimError):
    """Numerical propagation failed."""

    exit_code = 3


class InvariantViolation(GateSimError):
    """A physical invariant (Hermiticity, unitarity, normalization) does not hold."""

    exit_code = 4


class NormDriftError(InvariantViolation, IntegrationError):
    """State norm drifted beyond the integrator tolerance."""

    exit_code = 4

    def __init__(self, message: str, time: float, drift: float):
        super().__init__(message)
        self.time = time
        self.drift = drift

    def __reduce__(self):
        return type(self), (self.args[0], self.time, self.drift)
