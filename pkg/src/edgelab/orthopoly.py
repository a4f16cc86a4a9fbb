"""Orthogonal polynomials for the varying weight exp(-n V) on a truncated
interval: recurrence coefficients, wavefunctions, reproducing kernels.

The polynomials are orthogonal on [-L, L] with L chosen so the discarded
tails sit far below double-precision resolution; the recurrence data of the
truncated and whole-line systems then agree to within round-off.  The

coefficients are produced by the discretized Stieltjes procedure: Lanczos
iteration with the node-coordinate operator on a composite Gauss-Legendre
grid, with full reorthogonalization at every step (plain Gram-Schmidt on
monomials is hopeless at these degrees).  Wavefunction evaluation between
nodes uses the three-term recurrence with an exponent-carrying scaling so
that p_l * exp(-n V / 2) never overflows even when either factor does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla
from scipy.special import roots_legendre

from .equilibrium import solve_support
from .errors import PrecisionLossError
from .potential import Potential, evaluate

_LOG_TAIL = 60.0 * math.log(10.0)   # weighted tails below 1e-60 of scale
_PANEL_ORDER = 24
# mantissa cap for the scaled recurrence; low enough that products of two
# mantissas (kernel cross terms) stay inside double range
_RENORM_LIMIT = 1.0e120
_RENORM_LOG = math.log(_RENORM_LIMIT)


@dataclass(frozen=True)
class QuadratureGrid:
    """Composite Gauss-Legendre rule on [-L, L], resolution tied to n."""
    nodes: np.ndarray
    weights: np.ndarray
    L: float
    n: int

    def __post_init__(self):
        if not np.all(np.diff(self.nodes) > 0):
            raise ValueError("grid nodes must be strictly increasing")
        if not np.all(self.weights > 0):
            raise ValueError("grid weights must be positive")


@dataclass(frozen=True)
class RecurrenceTable:
    """Recurrence data J_l, q_l for l < n1 = ceil(n (1 + margin/4))."""
    n: int
    n1: int
    J: np.ndarray
    q: np.ndarray
    grid: QuadratureGrid
    potential: Potential
    mu0: float                    # mass of exp(-n (V - v_offset)) on [-L, L]
    margin: float
    q_drift: float                # max |q_l| measured before the even-V zeroing
    v_offset: float = 0.0         # reference level subtracted from V

    @property
    def psi0(self) -> float:
        return 1.0 / math.sqrt(self.mu0)


def truncation_radius(p: Potential, n: int, margin: float = 2.0) -> float:
    """Smallest half-multiple L with L >= 2*(outermost endpoint) and the
    weighted-tail exponent n*(V/2 - (2+margin) log L) above 60*ln10."""
    eq = solve_support(p)
    outer = max(abs(lo) for iv in eq.support.intervals() for lo in iv)
    L = 0.5 * math.ceil(2 * (2.0 * outer))
    while True:
        vmin = min(float(evaluate(p, L)), float(evaluate(p, -L)))
        if n * (0.5 * vmin - (2.0 + margin) * math.log(L)) > _LOG_TAIL and L > 1.0:
            return L
        L += 0.5


def build_grid(p: Potential, n: int, margin: float = 2.0,
               points_factor: float = 12.0) -> QuadratureGrid:
    """Composite Gauss-Legendre grid resolving weighted polynomials of
    degree up to 2*n1 + 2.

    Node density in the oscillatory zone scales like n times the peak
    equilibrium density (with headroom); far outside the support the
    integrands are smooth exponential tails and panels are coarser.
    """
    if n < 4:
        raise ValueError("n must be at least 4")
    eq = solve_support(p)
    L = truncation_radius(p, n, margin)
    outer = max(abs(lo) for iv in eq.support.intervals() for lo in iv)
    probe = np.linspace(-outer, outer, 2001)
    from .equilibrium import density
    rho_max = float(np.max(density(eq, probe)))
    inner_hi = min(L, outer + 0.6)
    per_unit_inner = max(160.0, points_factor * n * max(rho_max, 0.25))
    per_unit_outer = max(64.0, 2.0 * n)

    xk, wk = roots_legendre(_PANEL_ORDER)
    nodes, weights = [], []

    def add_zone(lo, hi, per_unit):
        if hi <= lo:
            return
        panels = max(1, math.ceil((hi - lo) * per_unit / _PANEL_ORDER))
        edges = np.linspace(lo, hi, panels + 1)
        for a, b in zip(edges[:-1], edges[1:]):
            nodes.append(0.5 * (b - a) * xk + 0.5 * (a + b))
            weights.append(0.5 * (b - a) * wk)

    add_zone(-L, -inner_hi, per_unit_outer)
    add_zone(-inner_hi, inner_hi, per_unit_inner)
    add_zone(inner_hi, L, per_unit_outer)
    return QuadratureGrid(np.concatenate(nodes), np.concatenate(weights), L, n)


def _weight_needs_extended(grid: QuadratureGrid, p: Potential, n: int,
                           n1: int) -> bool:
    """True when sqrt(exp(-n V)) underflows double precision inside the
    oscillatory support of the highest-index wavefunction.

    The degree-n1 polynomials live on the support of the equilibrium
    measure for the weakened potential V * n/n1; if exp(-n V / 2) flushes
    to zero before that edge, the discrete measure is silently truncated
    and every J_l beyond the crossover is wrong.
    """
    eq_inflated = solve_support(p.scaled(n / float(n1)))
    needed = max(abs(e) for iv in eq_inflated.support.intervals() for e in iv)
    v = evaluate(p, grid.nodes).real
    logw = -0.5 * n * (v - v.min())
    covered = np.abs(grid.nodes[logw > -700.0])
    return covered.size == 0 or covered.max() < needed + 0.05


def recurrence_coefficients(grid: QuadratureGrid, p: Potential, n: int,
                            margin: float = 2.0,
                            precision: str = "auto") -> RecurrenceTable:
    """Stieltjes/Lanczos recurrence coefficients for the weight exp(-n V).

    ``precision`` is "auto", "double", or "extended"; auto escalates to
    extended (long double, exponent range e^(+-11000)) when the weight's
    dynamic range exceeds double precision across the needed support, or
    if the loss-of-orthogonality detector trips.
    """
    n1 = math.ceil(n * (1.0 + margin / 4.0))
    use_extended = precision == "extended" or (
        precision == "auto" and _weight_needs_extended(grid, p, n, n1))
    while True:
        try:
            J, q, mu0, drift, v_offset = _lanczos(grid, p, n, n1, use_extended)
            break
        except PrecisionLossError:
            if precision == "auto" and not use_extended:
                use_extended = True
                continue
            raise
    even = p.is_even
    q_drift = float(np.max(np.abs(q))) if even else 0.0
    if even:
        q = np.zeros_like(q)
    return RecurrenceTable(n=n, n1=n1, J=J, q=q, grid=grid, potential=p,
                           mu0=mu0, margin=margin, q_drift=max(q_drift, drift),
                           v_offset=v_offset)


def _lanczos(grid, p, n, n1, extended):
    dtype = np.longdouble if extended else np.float64
    x = grid.nodes.astype(dtype)
    # sqrt-weight assembled in log space, referenced to min V (a constant
    # weight factor leaves J, q and the wavefunctions unchanged but keeps
    # double-well weights with negative minima representable)
    vpot = evaluate(p, grid.nodes).real.astype(dtype)
    v_offset = float(min(vpot.min(), 0.0))
    logv = (-0.5 * n) * (vpot - v_offset) \
        + 0.5 * np.log(grid.weights.astype(dtype))
    with np.errstate(under="ignore"):
        v = np.exp(logv)
    mu0 = float(np.sum(v * v))
    v /= np.sqrt(np.sum(v * v))

    m = len(x)
    Q = np.empty((m, n1 + 1), dtype=dtype)
    Q[:, 0] = v
    J = np.empty(n1, dtype=float)
    q = np.empty(n1, dtype=float)
    drift = 0.0
    for l in range(n1):
        u = x * Q[:, l]
        alpha = float(np.dot(Q[:, l], u))
        u = u - alpha * Q[:, l]
        if l > 0:
            u = u - J[l - 1] * Q[:, l - 1]
        # full reorthogonalization, twice
        for _ in range(2):
            h = Q[:, :l + 1].T @ u
            u = u - Q[:, :l + 1] @ h
        resid = float(np.max(np.abs(Q[:, :l + 1].T @ u)))
        beta = float(np.sqrt(np.dot(u, u)))
        if beta <= 0 or not np.isfinite(beta):
            raise PrecisionLossError(
                f"recurrence breakdown at l={l}: grid cannot resolve degree")
        drift = max(drift, resid / beta)
        if resid / beta > 1e-8:
            raise PrecisionLossError(
                f"orthogonality drift {resid / beta:.2e} at l={l}; "
                "escalate precision or refine the grid")
        q[l] = alpha
        J[l] = beta
        Q[:, l + 1] = u / beta
    return J, q, mu0, drift, v_offset


# ---------------------------------------------------------------------------
# wavefunction evaluation (scaled three-term recurrence)
# ---------------------------------------------------------------------------

def _psi_recurrence(table: RecurrenceTable, l: int, lam, derivatives: bool = False):
    """(psi_{l-1}, psi_l [, psi'_{l-1}, psi'_l]) at lam, as (mantissa, logered exp).

    Runs the polynomial recurrence with exponent renormalization, then
    attaches exp(-n V / 2) in log space.  Returns arrays matching lam.
    """
    if not 0 <= l <= table.n1:
        raise ValueError(f"index l={l} outside the table range 0..{table.n1}")
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    J, q = table.J, table.q
    cur = np.full_like(lam, table.psi0)
    prev = np.zeros_like(lam)
    logsc = np.zeros_like(lam)
    if derivatives:
        dcur = np.zeros_like(lam)
        dprev = np.zeros_like(lam)
    for k in range(l):
        jk = J[k]
        nxt = ((lam - q[k]) * cur - (J[k - 1] * prev if k > 0 else 0.0)) / jk
        if derivatives:
            dnxt = (cur + (lam - q[k]) * dcur -
                    (J[k - 1] * dprev if k > 0 else 0.0)) / jk
            dprev, dcur = dcur, dnxt
        prev, cur = cur, nxt
        big = np.abs(cur) > _RENORM_LIMIT
        if np.any(big):
            f = np.where(big, 1.0 / _RENORM_LIMIT, 1.0)
            cur = cur * f
            prev = prev * f
            if derivatives:
                dcur = dcur * f
                dprev = dprev * f
            logsc = logsc + np.where(big, _RENORM_LOG, 0.0)
    expo = logsc - 0.5 * table.n * (
        evaluate(table.potential, lam).real - table.v_offset)
    if derivatives:
        return prev, cur, dprev, dcur, expo
    return prev, cur, expo


def wavefunction(table: RecurrenceTable, l: int, lam):
    """psi_l(lambda) = p_l(lambda) exp(-n V / 2); underflows quietly to 0."""
    prev, cur, expo = _psi_recurrence(table, l, lam)
    with np.errstate(under="ignore", over="ignore"):
        out = cur * np.exp(expo)
    out = np.where(np.isfinite(out), out, 0.0)
    if np.ndim(lam) == 0:
        return float(out[0])
    return out


def wavefunctions_upto(table: RecurrenceTable, lmax: int, lam) -> np.ndarray:
    """Matrix psi_l(lam_j) for l = 0..lmax (plain doubles, bulk use)."""
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    J, q = table.J, table.q
    with np.errstate(under="ignore"):
        wh = np.exp(-0.5 * table.n *
                    (evaluate(table.potential, lam).real - table.v_offset))
    out = np.empty((lmax + 1, len(lam)))
    cur = np.full_like(lam, table.psi0) * wh
    prev = np.zeros_like(lam)
    out[0] = cur
    for k in range(lmax):
        nxt = ((lam - q[k]) * cur - (J[k - 1] * prev if k > 0 else 0.0)) / J[k]
        prev, cur = cur, nxt
        out[k + 1] = cur
    return out


def _kernel_parts(table: RecurrenceTable, pts, derivatives=True):
    n = table.n
    pm, pn, dpm, dpn, expo = _psi_recurrence(table, n, pts, derivatives=True)
    return pm, pn, dpm, dpn, expo


def kernel_matrix(table: RecurrenceTable, pts) -> np.ndarray:
    """Reproducing kernel K_n(x_i, x_j) on a set of points.

    Christoffel-Darboux form off the diagonal; coincident (or nearly so)
    pairs use the analytically differentiated recurrence.
    """
    pts = np.atleast_1d(np.asarray(pts, dtype=float))
    pm, pn, dpm, dpn, expo = _kernel_parts(table, pts)
    jn = table.J[table.n - 1]
    with np.errstate(under="ignore", over="ignore", invalid="ignore"):
        # cross terms p_n(x) p_{n-1}(y) e^{expo_x + expo_y}
        escale = np.exp(np.add.outer(expo, expo))
        cross = (np.outer(pn, pm) - np.outer(pm, pn)) * escale
        diff = np.subtract.outer(pts, pts)
        with np.errstate(divide="ignore", invalid="ignore"):
            K = jn * cross / diff
        diag = jn * (dpn * pm - dpm * pn) * np.exp(2.0 * expo)
        near = np.abs(diff) < 1e-9 * np.maximum(1.0, np.abs(pts)[:, None])
        ii, jj = np.nonzero(near)
        K[ii, jj] = 0.5 * (diag[ii] + diag[jj])
    K = np.where(np.isfinite(K), K, 0.0)
    return 0.5 * (K + K.T)


def cd_kernel(table: RecurrenceTable, x: float, y: float) -> float:
    """K_n(x, y) for a single pair."""
    return float(kernel_matrix(table, np.array([x, y]))[0, 1]) if x != y \
        else float(kernel_matrix(table, np.array([x]))[0, 0])


def cd_kernel_direct(table: RecurrenceTable, x: float, y: float) -> float:
    """Direct summation sum_{l<n} psi_l(x) psi_l(y) (cross-check oracle)."""
    vx = wavefunctions_upto(table, table.n - 1, x)[:, 0]
    vy = wavefunctions_upto(table, table.n - 1, y)[:, 0]
    return float(np.dot(vx, vy))


def finite_density(table: RecurrenceTable, lam):
    """rho_n(lambda) = K_n(lambda, lambda) / n."""
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=float))
    pm, pn, dpm, dpn, expo = _kernel_parts(table, lam_arr)
    jn = table.J[table.n - 1]
    with np.errstate(under="ignore", over="ignore", invalid="ignore"):
        out = jn * (dpn * pm - dpm * pn) * np.exp(2.0 * expo) / table.n
    out = np.where(np.isfinite(out), np.maximum(out, 0.0), 0.0)
    if np.ndim(lam) == 0:
        return float(out[0])
    return out


def correlation_det(table: RecurrenceTable, points) -> float:
    """Correlation-function determinant det K_n(x_i, x_j)."""
    pts = np.asarray(points, dtype=float)
    if len(np.unique(pts)) != len(pts):
        # coincident points give a rank-deficient kernel matrix
        return 0.0
    return float(np.linalg.det(kernel_matrix(table, pts)))


# ---------------------------------------------------------------------------
# Jacobi operator view
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class JacobiOperator:
    """Symmetric tridiagonal operator built from a recurrence table."""
    table: RecurrenceTable

    @property
    def size(self) -> int:
        return self.table.n1 + 1

    def diagonal(self) -> np.ndarray:
        d = np.zeros(self.size)
        d[: self.table.n1] = self.table.q
        return d

    def offdiagonal(self) -> np.ndarray:
        return self.table.J[: self.size - 1]

    def dense(self) -> np.ndarray:
        m = np.diag(self.diagonal())
        off = self.offdiagonal()
        idx = np.arange(self.size - 1)
        m[idx, idx + 1] = off
        m[idx + 1, idx] = off
        return m


def jacobi_resolvent_entries(jop: JacobiOperator, z: complex,
                             window) -> np.ndarray:
    """Entries of (J - z I)^{-1} on window x window via tridiagonal solves."""
    if abs(z.imag) < 1e-12:
        raise ValueError("resolvent requires |Im z| >= 1e-12")
    window = np.asarray(window, dtype=int)
    if np.any(window < 0) or np.any(window >= jop.size):
        raise ValueError("window indices outside the operator range")
    m = jop.size
    ab = np.zeros((3, m), dtype=complex)
    ab[0, 1:] = jop.offdiagonal()
    ab[1, :] = jop.diagonal() - z
    ab[2, :-1] = jop.offdiagonal()
    rhs = np.zeros((m, len(window)), dtype=complex)
    rhs[window, np.arange(len(window))] = 1.0
    sol = sla.solve_banded((1, 1), ab, rhs)
    return sol[window, :]


__all__ = [
    "QuadratureGrid", "RecurrenceTable", "JacobiOperator",
    "truncation_radius", "build_grid", "recurrence_coefficients",
    "wavefunction", "wavefunctions_upto", "kernel_matrix", "cd_kernel",
    "cd_kernel_direct", "finite_density", "correlation_det",
    "jacobi_resolvent_entries",
]
