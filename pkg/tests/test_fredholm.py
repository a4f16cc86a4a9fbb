import math

import numpy as np
import pytest

from edgelab import fredholm as fr
from edgelab import equilibrium as eqm
from edgelab import orthopoly as op
from edgelab.airy import airy_kernel
from edgelab.errors import QuadratureError
from edgelab.potential import parse_potential

# frozen refined-quadrature oracle (order-256 run, tail at nu < 1e-16)
F2_AT_0 = 0.9693728283552597


def test_empty_interval_list_is_identity():
    prob = fr.FredholmProblem(lambda x: np.zeros((len(x), len(x))), (), 16)
    assert fr.nystrom_det(prob) == 1.0


def test_problem_validation():
    kern = lambda x: np.zeros((len(x), len(x)))
    with pytest.raises(ValueError):
        fr.FredholmProblem(kern, ((0.0, 0.0),), 16)
    with pytest.raises(ValueError):
        fr.FredholmProblem(kern, ((0.0, 2.0), (1.0, 3.0)), 16)
    with pytest.raises(ValueError):
        fr.FredholmProblem(kern, ((0.0, 1.0),), 4)


def test_far_interval_gives_one():
    assert fr.tw_cdf(8.0) == pytest.approx(1.0, abs=1e-9)


def test_f2_at_zero_frozen_oracle():
    assert fr.tw_cdf(0.0) == pytest.approx(F2_AT_0, abs=1e-8)


def test_left_tail_tiny():
    assert fr.tw_cdf(-10.0, quad_order=160) < 1e-3


def test_node_doubling_cauchy():
    for s in (-6.0, -2.0, 0.0, 4.0):
        prob = fr.airy_problem([(s, math.inf)], 80)
        d80 = fr._det_at_order(prob, 80)
        d160 = fr._det_at_order(prob, 160)
        assert abs(d160 - d80) < 1e-9


def test_monotone_cdf():
    s = np.linspace(-8.0, 4.0, 50)
    vals = np.array([fr.tw_cdf(float(x), tol=1e-10) for x in s])
    assert np.all(np.diff(vals) >= -1e-10)


def test_split_interval_consistency():
    for s, u in ((-1.0, 0.7), (0.0, 1.3), (-4.0, -1.0)):
        whole = fr.nystrom_det(fr.airy_problem([(s, math.inf)]))
        split = fr.nystrom_det(fr.airy_problem([(s, u), (u, math.inf)]))
        assert abs(whole - split) < 1e-9


def test_tail_vs_edge_density():
    # 1 - F2(s) ~ int K(t,t) dt = nu-tail for large s (first series term)
    one_minus = 1.0 - fr.tw_cdf(4.0, tol=1e-12)
    from scipy import integrate
    nu_tail, _ = integrate.quad(lambda t: airy_kernel(t, t), 4.0, 16.0,
                                limit=300)
    assert abs(one_minus - nu_tail) < 0.1 * nu_tail


def test_series_oracle_matches_small_kernel():
    prob = fr.airy_problem([(3.0, math.inf)])
    assert fr.fredholm_series_loworder(prob, lmax=3) == pytest.approx(
        fr.nystrom_det(prob), abs=1e-9)


def test_hadamard_bound_on_series_terms():
    # l-th series term bounded by (nu-tail)^l / l! for the PSD Airy kernel
    from scipy import integrate
    s = 0.0
    tail, _ = integrate.quad(lambda t: airy_kernel(t, t), s, 16.0, limit=300)
    prob = fr.airy_problem([(s, math.inf)])
    t_series = []
    prev = 1.0
    for lmax in (1, 2, 3):
        cur = fr.fredholm_series_loworder(prob, lmax=lmax, order=200)
        t_series.append(abs(cur - prev))
        prev = cur
    for l, term in enumerate(t_series, start=1):
        assert term <= tail ** l / math.factorial(l) + 1e-12


def test_nonconvergent_quadrature_reports_values():
    # a kernel engineered to defeat refinement: order-dependent noise
    calls = []

    def noisy(x):
        calls.append(len(x))
        base = np.add.outer(np.cos(997.0 * x), np.cos(991.0 * x))
        return 0.5 * base

    prob = fr.FredholmProblem(noisy, ((0.0, 3.0),), 8)
    with pytest.raises(QuadratureError, match="did not converge"):
        fr.nystrom_det(prob, tol=1e-14)


@pytest.fixture(scope="module")
def gue_table_200():
    pot = parse_potential("poly:0,0,2")
    return op.recurrence_coefficients(op.build_grid(pot, 200), pot, 200)


@pytest.fixture(scope="module")
def gue_edge():
    eq = eqm.solve_support(parse_potential("poly:0,0,2"))
    return eqm.edge_constants(eq, "right")


def test_hole_probability_basics(gue_table_200, gue_edge):
    assert fr.hole_probability_finite_n(gue_table_200, gue_edge, []) == 1.0
    e_n = fr.hole_probability_finite_n(gue_table_200, gue_edge,
                                       [(0.0, math.inf)])
    assert 0.0 <= e_n <= 1.0
    assert abs(e_n - F2_AT_0) < 0.05


def test_hole_probability_split_consistency(gue_table_200, gue_edge):
    whole = fr.hole_probability_finite_n(gue_table_200, gue_edge,
                                         [(0.0, math.inf)], tol=1e-10)
    split = fr.hole_probability_finite_n(gue_table_200, gue_edge,
                                         [(0.0, 1.1), (1.1, math.inf)],
                                         tol=1e-10)
    assert abs(whole - split) < 1e-9


def test_hole_probability_left_edge(gue_table_200):
    eq = eqm.solve_support(parse_potential("poly:0,0,2"))
    left = eqm.edge_constants(eq, "left")
    right = eqm.edge_constants(eq, "right")
    a = fr.hole_probability_finite_n(gue_table_200, left, [(0.0, math.inf)])
    b = fr.hole_probability_finite_n(gue_table_200, right, [(0.0, math.inf)])
    assert a == pytest.approx(b, abs=1e-10)


def test_rescaled_kernel_orientation(gue_table_200, gue_edge):
    kern = fr.rescaled_kernel(gue_table_200, gue_edge)
    t = np.array([0.0, 1.0, 2.5])
    mat = kern(t)
    assert np.allclose(mat, mat.T)
    assert mat[0, 0] > mat[2, 2] > 0  # density decays out of the support
