import math

import numpy as np
import pytest

from edgelab import orthopoly as op
from edgelab.errors import PrecisionLossError
from edgelab.potential import parse_potential

GUE = parse_potential("poly:0,0,2")
QUARTIC = parse_potential("poly:0,0,0,0,0.25")


def hermite_fn(l, x):
    """Stable normalized Hermite functions h_l = H_l e^{-x^2/2}/sqrt(2^l l! sqrt(pi))."""
    h0 = np.pi ** -0.25 * np.exp(-x * x / 2)
    if l == 0:
        return h0
    h1 = math.sqrt(2.0) * x * h0
    for k in range(1, l):
        h0, h1 = h1, math.sqrt(2.0 / (k + 1)) * x * h1 - math.sqrt(k / (k + 1.0)) * h0
    return h1


@pytest.fixture(scope="module")
def gue50():
    grid = op.build_grid(GUE, 50)
    return op.recurrence_coefficients(grid, GUE, 50)


@pytest.fixture(scope="module")
def gue100():
    grid = op.build_grid(GUE, 100)
    return op.recurrence_coefficients(grid, GUE, 100)


def test_grid_invariants(gue50):
    g = gue50.grid
    assert np.all(np.diff(g.nodes) > 0)
    assert np.all(g.weights > 0)
    assert g.nodes[0] > -g.L - 1e-12 and g.nodes[-1] < g.L + 1e-12
    # symmetric under negation for even V
    assert np.allclose(g.nodes, -g.nodes[::-1], atol=1e-12)


def test_truncation_radius_rule():
    L = op.truncation_radius(GUE, 100)
    assert L == 0.5 * round(L / 0.5)
    assert L >= 2.0
    vmin = 2.0 * L * L
    assert 100 * (0.5 * vmin - 4.0 * math.log(L)) > 60 * math.log(10)


def test_hermite_closed_form(gue100):
    l = np.arange(len(gue100.J))
    closed = np.sqrt((l + 1) / 400.0)
    rel = np.abs(gue100.J - closed) / closed
    assert rel[:121].max() < 1e-10


def test_tiny_case_exact_moments():
    # n = 2: weight e^{-4 lambda^2}: J_0^2 = m2/m0 = 1/8
    grid = op.build_grid(GUE, 4)
    tab = op.recurrence_coefficients(grid, GUE, 2)
    assert tab.J[0] == pytest.approx(math.sqrt(1.0 / 8.0), rel=1e-12)


def test_even_potential_q_zero(gue50):
    assert np.all(gue50.q == 0.0)
    assert gue50.q_drift < 1e-10


def test_truncation_stability_under_doubling():
    # doubling L and doubling the node count must not move J_l
    n = 50
    base = op.recurrence_coefficients(op.build_grid(GUE, n), GUE, n)
    gridL = op.build_grid(GUE, n)
    big = op.QuadratureGrid(
        np.concatenate([gridL.nodes - 2 * gridL.L, gridL.nodes,
                        gridL.nodes + 2 * gridL.L]),
        np.concatenate([gridL.weights] * 3), 3 * gridL.L, n)
    tabL = op.recurrence_coefficients(big, GUE, n)
    assert np.max(np.abs(tabL.J - base.J)) < 1e-12
    dense = op.build_grid(GUE, n, points_factor=24.0)
    tabD = op.recurrence_coefficients(dense, GUE, n)
    assert np.max(np.abs(tabD.J - base.J)) < 1e-12


def test_orthonormality_gram(gue50):
    V = op.wavefunctions_upto(gue50, 50, gue50.grid.nodes)
    G = (V * gue50.grid.weights) @ V.T
    assert np.max(np.abs(G - np.eye(51))) < 1e-9


def test_wavefunction_matches_hermite(gue50):
    lam = np.linspace(-2.0, 2.0, 81)
    psi = op.wavefunction(gue50, 50, lam)
    oracle = (2 * 50) ** 0.25 * hermite_fn(50, lam * math.sqrt(100.0))
    assert np.max(np.abs(psi - oracle)) < 1e-9


def test_wavefunction_underflow_guard(gue50):
    # when exp(-n V / 2) underflows past the polynomial growth the weighted
    # value flushes quietly to zero
    assert op.wavefunction(gue50, 10, 6.0) == 0.0


def test_jpp_quadrature_identity(gue50):
    lam, w = gue50.grid.nodes, gue50.grid.weights
    V = op.wavefunctions_upto(gue50, 31, lam)
    for l in (5, 17, 30):
        val = float(np.sum(w * lam * V[l + 1] * V[l]))
        assert val == pytest.approx(gue50.J[l], abs=1e-10)


def test_cd_kernel_vs_direct_sum():
    n = 30
    tab = op.recurrence_coefficients(op.build_grid(GUE, n), GUE, n)
    rng = np.random.default_rng(11)
    for _ in range(20):
        x, y = rng.uniform(-1.1, 1.1, 2)
        assert op.cd_kernel(tab, x, y) == pytest.approx(
            op.cd_kernel_direct(tab, x, y), abs=1e-9)
    # symmetry
    m = op.kernel_matrix(tab, np.array([-0.3, 0.1, 0.9]))
    assert np.allclose(m, m.T)


def test_kernel_diagonal_derivative_form(gue50):
    # CD diagonal equals the x -> y limit of the quotient form
    for x in (-0.8, 0.0, 0.63):
        diag = op.kernel_matrix(gue50, np.array([x]))[0, 0]
        near = op.cd_kernel(gue50, x, x + 1e-6)
        assert diag == pytest.approx(near, rel=1e-5)


def test_finite_density_normalization(gue50):
    rho = op.finite_density(gue50, gue50.grid.nodes)
    assert np.all(rho >= 0)
    total = float(np.sum(rho * gue50.grid.weights))
    assert total == pytest.approx(1.0, abs=1e-10)


def test_finite_density_bulk_limit():
    n = 200
    tab = op.recurrence_coefficients(op.build_grid(GUE, n), GUE, n)
    assert abs(op.finite_density(tab, 0.0) - 2.0 / math.pi) < 0.02


def test_correlation_det_properties(gue50):
    lam = 0.4
    assert op.correlation_det(gue50, [lam]) == pytest.approx(
        50 * op.finite_density(gue50, lam), rel=1e-12)
    assert op.correlation_det(gue50, [0.2, 0.2]) == 0.0
    rng = np.random.default_rng(12)
    for _ in range(10):
        x, y = rng.uniform(-1, 1, 2)
        k = op.kernel_matrix(gue50, np.array([x, y]))
        det = k[0, 0] * k[1, 1] - k[0, 1] ** 2
        assert det >= -1e-10 * max(1.0, k[0, 0] * k[1, 1])


def test_quartic_recurrence_sane():
    n = 40
    tab = op.recurrence_coefficients(op.build_grid(QUARTIC, n), QUARTIC, n)
    assert np.all(tab.J > 0)
    assert np.all(tab.q == 0.0)
    V = op.wavefunctions_upto(tab, n, tab.grid.nodes)
    G = (V * tab.grid.weights) @ V.T
    assert np.max(np.abs(G - np.eye(n + 1))) < 1e-9


def test_resolvent_entries(gue50):
    jop = op.JacobiOperator(gue50)
    z = 0.9 + 0.05j
    window = np.arange(40, 51)
    r = op.jacobi_resolvent_entries(jop, z, window)
    # defining relation on the full matrix
    full = op.jacobi_resolvent_entries(jop, z, np.arange(jop.size))
    dense = jop.dense().astype(complex) - z * np.eye(jop.size)
    assert np.max(np.abs(dense @ full - np.eye(jop.size))) < 1e-12
    # Herglotz diagonal
    assert np.all(np.diag(r).imag > 0)
    # spectral-representation oracle at small size
    n2 = 20
    tab2 = op.recurrence_coefficients(op.build_grid(GUE, n2), GUE, n2)
    jop2 = op.JacobiOperator(tab2)
    evals, evecs = np.linalg.eigh(jop2.dense())
    z2 = 0.5 + 0.3j
    spect = evecs @ np.diag(1.0 / (evals - z2)) @ evecs.T
    win = np.arange(jop2.size)
    mine = op.jacobi_resolvent_entries(jop2, z2, win)
    assert np.max(np.abs(mine - spect)) < 1e-11


def test_resolvent_rejects_real_z(gue50):
    jop = op.JacobiOperator(gue50)
    with pytest.raises(ValueError):
        op.jacobi_resolvent_entries(jop, 1.0 + 0.0j, np.arange(3))


def test_precision_escalation_hint():
    # a grid far too coarse for the requested degree must fail loudly
    xk = np.linspace(-2.0, 2.0, 41)
    bad = op.QuadratureGrid(xk, np.full_like(xk, 4.0 / 41), 2.0, 50)
    with pytest.raises(PrecisionLossError):
        op.recurrence_coefficients(bad, GUE, 50, precision="double")
