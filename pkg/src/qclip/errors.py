"""Exception types raised across the package."""


class QCLipError(Exception):
    """Base class for every error raised by qclip."""


class StencilError(QCLipError, ValueError):
    """A finite-difference stencil leaves the domain of the sampled map."""


class DomainError(QCLipError, ValueError):
    """A point lies outside the region where an operation is defined."""


class DegenerateError(QCLipError, ValueError):
    """Coincident points, vanishing Jacobian or a zero of the map."""


class InfeasibleLambdaError(QCLipError):
    """No grid value of the localisation parameter satisfies the constraints."""


class AlphaExhaustedError(QCLipError):
    """The boundary annulus cannot be thinned enough to meet the precondition."""

    def __init__(self, message, curve=None):
        super().__init__(message)
        self.curve = list(curve or [])


class ConvergenceError(QCLipError):
    """An iterative solver stopped before reaching its tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ConfigError(QCLipError, ValueError):
    """Malformed run configuration."""
