"""Exception types shared across the package."""


class EdgeLabError(Exception):
    """Base class for all edge-lab errors."""


class PotentialFormatError(EdgeLabError):
    """Raised when a potential string or coefficient list violates an invariant."""


class SupportSolveError(EdgeLabError):
    """Raised when the support solver fails to converge or finds a bad measure."""


class NonGenericEdgeError(EdgeLabError):
    """Raised when the master polynomial is nonpositive at a support endpoint."""


class PrecisionLossError(EdgeLabError):
    """Raised when the recurrence builder detects loss of orthogonality."""


class QuadratureError(EdgeLabError):
    """Raised when a quadrature or determinant refinement fails to converge."""
