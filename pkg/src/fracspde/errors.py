"""Exception types shared across the package."""

from __future__ import annotations


class FracspdeError(Exception):
    """Base class for all package errors."""


class NonConvergence(FracspdeError):
    """A series or iterative evaluation failed to reach the requested tolerance."""


class GridTooShort(FracspdeError):
    """A time grid has too few points for the requested scheme."""


class QuadratureFailure(FracspdeError):
    """Numerical integration failed or the integral is divergent.

    Carries the partial value and the achieved error estimate when available.
    """

    def __init__(self, message, value=None, error_estimate=None):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate


class EvaluationAtSingularity(FracspdeError):
    """Kernel requested at a point where it is genuinely unbounded."""


class SingularArgument(FracspdeError):
    """Covariance kernel evaluated at a singular point (e.g. v = 0)."""


class NotPositiveSemidefinite(FracspdeError):
    """Assembled covariance matrix required clipping beyond tolerance."""


class FitFailure(FracspdeError):
    """Envelope constant fit diverged under grid refinement."""


class DivergenceDetected(FracspdeError):
    """An integral known to diverge for the given parameters was requested."""


class DegenerateBranch(FracspdeError):
    """Parameters sit on the logarithmic branch of the double-integral lemma."""


class NumericalBlowup(FracspdeError):
    """A simulated field exceeded the stability cap."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class MissingEnvelope(FracspdeError):
    """Envelope exponents required but not available for this regime."""


class ConfigError(FracspdeError):
    """Invalid or unknown fields in a configuration document."""
