"""Reductions of the SU(2)-type Hitchin equations on R^2 and their integrable solutions."""

from . import algebra, fields, liouville, painleve, theta_torus
from .errors import HitchinError, NumericalError, ValidationError

__version__ = "0.1.0"

__all__ = [
    "algebra",
    "fields",
    "liouville",
    "painleve",
    "theta_torus",
    "HitchinError",
    "NumericalError",
    "ValidationError",
]
