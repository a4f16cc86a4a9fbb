"""edge-lab: equilibrium measures, varying-weight orthogonal polynomials,
Airy-kernel Fredholm determinants, and edge-scaling diagnostics for
polynomial matrix models."""

__version__ = "0.1.0"

from .errors import (
    EdgeLabError, PotentialFormatError, SupportSolveError,
    NonGenericEdgeError, PrecisionLossError, QuadratureError,
)
from .potential import Potential, parse_potential, evaluate, divided_difference
