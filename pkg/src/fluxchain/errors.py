"""Exception types shared across the toolkit."""


class FluxchainError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(FluxchainError):
    """Invalid input parameters or malformed configuration."""

    def __init__(self, message, field=None):
        self.field = field
        super().__init__(message if field is None else f"{field}: {message}")


class UsageError(FluxchainError):
    """Operation applied to data in the wrong state (e.g. wrong basis tag)."""


class IllConditionedError(FluxchainError):
    """Numerically ill-conditioned input (e.g. Cholesky failure)."""


class ResolutionError(FluxchainError):
    """Grid too coarse or too narrow for a converged spectrum."""


class ConvergenceError(FluxchainError):
    """Iterative solver failed to converge; carries the recorded trace."""

    def __init__(self, message, trace=None):
        self.trace = trace
        super().__init__(message)


class ResourceLimitError(FluxchainError):
    """Requested problem size exceeds the configured cap."""


class CalibrationRangeError(FluxchainError):
    """Measured value falls outside the modeled inversion range."""


class NearResonanceError(FluxchainError):
    """Dispersive formula evaluated too close to a resonance."""


class DivergentInductanceError(FluxchainError):
    """SQUID effective junction energy vanished; inductance diverges."""


class InjectionError(FluxchainError):
    """Wavepacket injection produced a pathological state."""


class AccuracyError(FluxchainError):
    """Accumulated truncation error exceeded the configured budget."""

    def __init__(self, message, result=None):
        self.result = result
        super().__init__(message)
