"""Polynomial confining potentials and their exact derivative algebra.

A potential is a real polynomial V(x) = c0 + c1*x + ... + cd*x^d with even
degree d >= 2 and cd > 0, which guarantees the confinement needed for a
well-defined equilibrium measure and for orthogonal polynomials with the
varying weight exp(-n*V).  All evaluation is done by Horner schemes; the
divided difference of V' is expanded in coefficients so that coincident
arguments are exact (no subtractive cancellation).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import PotentialFormatError

_POLY_RE = re.compile(r"^poly:(-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?(?:,-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)*)$")


@dataclass(frozen=True)
class Potential:
    """Real polynomial potential, coefficients in ascending degree.

    ``shift`` is a centering offset: the equilibrium solver stores here the
    amount s such that V(x + s) has a symmetric one-cut support.  The parser
    always produces shift = 0.
    """

    coeffs: tuple[float, ...]
    shift: float = 0.0

    def __post_init__(self):
        c = tuple(float(x) for x in self.coeffs)
        object.__setattr__(self, "coeffs", c)
        if len(c) < 3:
            raise PotentialFormatError(
                "degree must be >= 2 (need at least coefficients c0,c1,c2)")
        if c[-1] == 0.0:
            raise PotentialFormatError("leading coefficient must be nonzero")
        d = len(c) - 1
        if d % 2 != 0:
            raise PotentialFormatError(f"odd degree {d}: degree must be even")
        if c[-1] < 0.0:
            raise PotentialFormatError(
                f"non-positive leading coefficient {c[-1]}: growth condition fails")
        if not all(np.isfinite(c)):
            raise PotentialFormatError("all coefficients must be finite")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_even(self) -> bool:
        """True when V(x) = V(-x) and no centering shift is stored."""
        return self.shift == 0.0 and all(c == 0.0 for c in self.coeffs[1::2])

    def deriv_coeffs(self) -> np.ndarray:
        """Coefficients of V', ascending."""
        c = np.asarray(self.coeffs)
        return c[1:] * np.arange(1, len(c))

    def shifted(self, s: float) -> "Potential":
        """Potential W(x) = V(x + s), with the accumulated shift recorded."""
        p = np.polynomial.Polynomial(self.coeffs)
        q = p(np.polynomial.Polynomial([s, 1.0]))
        return Potential(tuple(q.coef), shift=self.shift + s)

    def scaled(self, factor: float) -> "Potential":
        """Potential factor * V, used for the deformed energy functional."""
        return Potential(tuple(factor * c for c in self.coeffs), shift=self.shift)

    def to_spec(self) -> str:
        return "poly:" + ",".join(repr(c) for c in self.coeffs)


def parse_potential(spec: str) -> Potential:
    """Parse the ``poly:c0,c1,...,cd`` DSL into a validated Potential.

    Raises PotentialFormatError naming the violated invariant for malformed
    text, odd degree, or a non-positive leading coefficient.
    """
    if not isinstance(spec, str) or not _POLY_RE.match(spec.strip()):
        raise PotentialFormatError(
            f"malformed potential {spec!r}: expected poly:c0,c1,...,cd "
            "with decimal literals and no spaces")
    body = spec.strip()[len("poly:"):]
    coeffs = [float(tok) for tok in body.split(",")]
    return Potential(tuple(coeffs))


def evaluate(p: Potential, z: complex | float | np.ndarray, order: int = 0):
    """Evaluate V (order 0) or V' (order 1) at z by Horner's scheme.

    Accepts real or complex scalars and numpy arrays; the analytic
    continuation of a polynomial is the same polynomial.
    """
    if order == 0:
        c = p.coeffs
    elif order == 1:
        c = tuple(p.deriv_coeffs())
    else:
        raise ValueError("order must be 0 or 1")
    acc = np.zeros_like(np.asarray(z), dtype=np.result_type(np.asarray(z).dtype, float))
    for ck in reversed(c):
        acc = acc * z + ck
    if np.ndim(z) == 0:
        return acc[()]
    return acc


def divided_difference(p: Potential, z, lam):
    """(V'(z) - V'(lam)) / (z - lam) via the coefficient expansion.

    Uses sum_j b_j sum_{i<j} z^i lam^{j-1-i} with b = coeffs of V', so the
    coincident limit z == lam returns V''(lam) exactly.  Symmetric in its
    two arguments; accepts scalars or broadcastable arrays.
    """
    b = p.deriv_coeffs()
    z = np.asarray(z)
    lam = np.asarray(lam)
    dtype = np.result_type(z.dtype, lam.dtype, float)
    # Horner in z; inner coefficients are polynomials in lam, also by Horner.
    acc = np.zeros(np.broadcast(z, lam).shape, dtype=dtype)
    for i in range(len(b) - 2, -1, -1):
        inner = np.zeros_like(acc)
        for j in range(len(b) - 1, i, -1):
            inner = inner * lam + b[j]
        acc = acc * z + inner
    if acc.ndim == 0:
        return acc[()]
    return acc


__all__ = ["Potential", "parse_potential", "evaluate", "divided_difference"]
