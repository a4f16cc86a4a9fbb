import json

import numpy as np
import pytest

from edgelab import diagnostics as dg
from edgelab import equilibrium as eqm
from edgelab import orthopoly as op
from edgelab.potential import parse_potential

GUE = parse_potential("poly:0,0,2")


@pytest.fixture(scope="module")
def gue_setup():
    eq = eqm.solve_support(GUE)
    edge = eqm.edge_constants(eq, "right")
    tables = {n: op.recurrence_coefficients(op.build_grid(GUE, n), GUE, n)
              for n in (48, 64, 96)}
    return eq, edge, tables


def test_report_round_trip():
    rep = dg.ConvergenceReport("demo", [10, 20], [0.5, 0.25], -1.0, True,
                               {"note": 1.0 / 3.0})
    back = dg.ConvergenceReport.from_json(rep.to_json())
    assert back == rep
    # float fidelity through the JSON text
    assert json.loads(rep.to_json())["details"]["note"] == 1.0 / 3.0


def test_recurrence_asymptotics_gue(gue_setup):
    eq, edge, tables = gue_setup
    run = dg.recurrence_asymptotics(tables[96], eq, edge)
    assert run["C"] <= 0.1
    rep = dg.recurrence_asymptotics_report(
        [tables[48], tables[96]], eq, edge)
    assert rep.passed
    assert rep.n_values == [48, 96]


def test_edge_kernel_error_decreases(gue_setup):
    eq, edge, tables = gue_setup
    t_grid = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
    rep = dg.edge_kernel_report([tables[48], tables[96]], [edge, edge], t_grid)
    assert rep.errors[1] < rep.errors[0]
    assert rep.passed


def test_edge_kernel_left_right_symmetry(gue_setup):
    eq, edge, tables = gue_setup
    left = eqm.edge_constants(eq, "left")
    t_grid = np.array([-1.0, 0.0, 1.0])
    r_right = dg.edge_kernel_error(tables[64], edge, t_grid)
    r_left = dg.edge_kernel_error(tables[64], left, t_grid)
    assert r_left["sup_error"] == pytest.approx(r_right["sup_error"], abs=1e-10)


def test_nu_convergence(gue_setup):
    eq, edge, tables = gue_setup
    s = np.linspace(-2, 2, 21)
    rep = dg.nu_report([tables[48], tables[96]], [edge, edge], s, tol_last=0.05)
    assert rep.passed
    assert rep.errors[1] < rep.errors[0]


def test_resolvent_comparison_mechanism(gue_setup):
    eq, edge, tables = gue_setup
    runs = [dg.resolvent_comparison(tables[n], eq, "right") for n in (48, 96)]
    for r in runs:
        assert r["identity_residual"] < 1e-12
        assert r["M"] == int(r["n"] ** 0.6)
    assert runs[1]["norm_D"] < runs[0]["norm_D"]
    assert runs[1]["window_diff"] < runs[0]["window_diff"]


def test_resolvent_window_guard(gue_setup):
    eq, edge, tables = gue_setup
    with pytest.raises(ValueError, match="window"):
        dg.resolvent_comparison(tables[64], eq, "right", M=40)


def test_tail_mass(gue_setup):
    eq, edge, tables = gue_setup
    t4 = dg.tail_mass(tables[96], edge, 4.0)
    t2 = dg.tail_mass(tables[96], edge, 2.0)
    assert 0.0 <= t4["mass"] < 0.01
    assert t2["mass"] >= t4["mass"]
    assert t4["nu_tail"] > 0
    rep = dg.tail_report(tables[96], edge)
    assert rep.passed


def test_two_cut_outer_edge_kernel_converges():
    # the outer-edge window of a two-interval support follows the same Airy
    # law once rescaled with the operator-consistent gamma
    pot = parse_potential("poly:0,0,-2,0,0.25")
    eq = eqm.solve_support(pot)
    edge = eqm.edge_constants(eq, "right")
    t_grid = np.array([-1.0, 0.0, 1.0])
    errs = []
    for n in (60, 120):
        tab = op.recurrence_coefficients(op.build_grid(pot, n), pot, n)
        errs.append(dg.edge_kernel_error(tab, edge, t_grid)["sup_error"])
    assert errs[1] < errs[0] < 0.02


def test_two_cut_inner_edge_density_converges():
    # interior endpoints face into the gap; with that orientation (and their
    # own operator constants) the rescaled density follows the same limit
    pot = parse_potential("poly:0,0,-2,0,0.25")
    eq = eqm.solve_support(pot)
    inner = eqm.edge_constants(eq, "inner-right")
    assert inner.side == "left"          # window opens toward the gap
    s = np.linspace(-1.5, 2.0, 15)
    errs = []
    for n in (60, 120):
        tab = op.recurrence_coefficients(op.build_grid(pot, n), pot, n)
        errs.append(dg.nu_convergence(tab, inner, s)["sup_error"])
    assert errs[1] < errs[0] < 0.02


def test_two_cut_resolvent_defect_small_and_decreasing():
    # the alternating-offset rescaled matrix makes (J - z) R* - I small at
    # the outer edge of a split support, and the defect shrinks with n
    pot = parse_potential("poly:0,0,-2,0,0.25")
    eq = eqm.solve_support(pot)
    runs = []
    for n in (48, 96):
        tab = op.recurrence_coefficients(op.build_grid(pot, n), pot, n)
        runs.append(dg.resolvent_comparison(tab, eq, "right"))
    assert runs[0]["norm_D"] < 0.5
    assert runs[1]["norm_D"] < runs[0]["norm_D"]
    assert runs[1]["window_diff"] < runs[0]["window_diff"]


def test_loglog_slope_fit():
    ns = [64, 128, 256]
    errs = [1.0, 0.5, 0.25]
    rep = dg.ConvergenceReport("x", ns, errs, dg._loglog_slope(ns, errs), True)
    assert rep.slope == pytest.approx(-1.0, rel=1e-12)
