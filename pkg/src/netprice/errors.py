"""Exception taxonomy shared across the package.

ParameterError and DomainError are ValueErrors so that plain-ValueError
handling keeps working; the CLI maps them to exit code 2 and the runtime
failures to exit code 3.
"""


class NetpriceError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(NetpriceError, ValueError):
    """An argument or configuration value is out of its admissible range."""


class DomainError(NetpriceError, ValueError):
    """A runtime precondition was violated (e.g. price outside the ball)."""


class SamplerError(NetpriceError, RuntimeError):
    """The MCMC sampler hit a non-recoverable state; carries diagnostics."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class CalibrationError(NetpriceError, RuntimeError):
    """Radius calibration could not reach the requested coverage."""
