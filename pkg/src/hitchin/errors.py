"""Exception hierarchy.

Validation errors (bad input, precondition violated) and numerical
failures (divergence, lost accuracy) are kept apart so the CLI can map
them onto distinct exit codes.
"""


class HitchinError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(HitchinError, ValueError):
    pass


class DomainError(ValidationError):
    """Evaluation point outside the region where derivatives are available."""


class SingularLocusError(ValidationError):
    """Point lies on g**2 == kappa**2 where the scalar field equation degenerates."""


class SingularPointError(ValidationError):
    """Pole of an exact solution."""


class IntegralityError(ValidationError):
    pass


class SeedAccuracyError(ValidationError):
    pass


class WindowError(ValidationError):
    pass


class ConvergenceError(ValidationError):
    """Theta series cannot converge (imaginary part of the period matrix not positive definite)."""


class SpectralDataError(ValidationError):
    pass


class NumericalError(HitchinError, RuntimeError):
    pass


class DivergenceError(NumericalError):
    def __init__(self, message, radius=None):
        super().__init__(message)
        self.radius = radius


class AccuracyError(NumericalError):
    pass


class SingularSolutionError(NumericalError):
    """A theta factor vanishes at the evaluation point."""
