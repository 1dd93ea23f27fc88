"""Generalized Riesz products, IP-Dirichlet window checks and G_p diagnostics."""

from .errors import (DissociationError, GuardError, InfeasibleError, InvariantViolation,
                     PrecisionError, RieszIPError, SequenceError, WitnessError)
from .numeric import RealBall, UnimodularPoint, circle_dist, frac_dist, nearest_int, signed_frac

__version__ = "0.1.0"

__all__ = [
    "RealBall", "UnimodularPoint", "circle_dist", "frac_dist", "nearest_int", "signed_frac",
    "RieszIPError", "PrecisionError", "InvariantViolation", "DissociationError",
    "SequenceError", "InfeasibleError", "GuardError", "WitnessError",
]
