import json
import math

import numpy as np
import pytest

from edgelab.cli import main


def run(tmp, *argv):
    return main(list(argv) + ["--out", str(tmp)])


def test_equilibrium_gue(tmp_path):
    assert run(tmp_path, "equilibrium", "--potential", "poly:0,0,2") == 0
    rec = json.loads((tmp_path / "equilibrium.json").read_text())
    assert rec["kind"] == "OneCut"
    assert rec["a"] == pytest.approx(1.0, abs=1e-10)
    right = [e for e in rec["edges"] if e["which"] == "right"][0]
    assert right["gamma"] == pytest.approx(2.0, abs=1e-9)
    lines = (tmp_path / "density.csv").read_text().splitlines()
    assert lines[0] == "lambda,rho"
    assert len(lines) == 1202
    assert (tmp_path / "density.png").exists()


def test_equilibrium_two_cut(tmp_path):
    assert run(tmp_path, "equilibrium", "--potential", "poly:0,0,-2,0,0.25") == 0
    rec = json.loads((tmp_path / "equilibrium.json").read_text())
    assert rec["kind"] == "TwoCut"
    assert rec["a"] == pytest.approx(math.sqrt(2.0), abs=1e-8)
    assert rec["b"] == pytest.approx(math.sqrt(6.0), abs=1e-8)


def test_missing_potential_usage_error(tmp_path):
    assert run(tmp_path, "equilibrium") == 2


def test_unknown_subcommand_exit_2():
    assert main(["frobnicate"]) == 2


def test_malformed_potential_usage_error(tmp_path):
    assert run(tmp_path, "equilibrium", "--potential", "poly:0,0,2,1") == 2


def test_solver_failure_exit_3(tmp_path):
    # a valid potential forced onto the wrong support kind is a numerical
    # failure, not a usage problem
    assert run(tmp_path, "equilibrium", "--potential", "poly:0,0,-2,0,0.25",
               "--kind", "one") == 3


def test_recurrence_outputs(tmp_path):
    assert run(tmp_path, "recurrence", "--potential", "poly:0,0,2",
               "--n", "40") == 0
    lines = (tmp_path / "recurrence.csv").read_text().splitlines()
    assert lines[0] == "l,J,q"
    meta = json.loads((tmp_path / "recurrence_meta.json").read_text())
    assert meta["n"] == 40 and meta["n1"] == 60
    assert (tmp_path / "recurrence.png").exists()


def test_tw_table_monotone(tmp_path):
    assert run(tmp_path, "tw", "--s-range", "-6:4:0.1") == 0
    lines = (tmp_path / "tw.csv").read_text().splitlines()
    assert lines[0] == "s,F2"
    assert len(lines) == 102      # 101 rows plus header
    vals = np.array([[float(t) for t in ln.split(",")] for ln in lines[1:]])
    assert np.all(np.diff(vals[:, 1]) >= -1e-10)
    meta = json.loads((tmp_path / "tw_meta.json").read_text())
    assert len(meta["points"]) == 101
    assert all("refinement_history" in pt and "truncation_T" in pt
               for pt in meta["points"])


def test_tw_matches_library_bit_for_bit(tmp_path):
    from edgelab.fredholm import tw_cdf
    assert run(tmp_path, "tw", "--s-range", "-1:1:1") == 0
    lines = (tmp_path / "tw.csv").read_text().splitlines()[1:]
    for ln in lines:
        s, f2 = (float(t) for t in ln.split(","))
        assert f2 == tw_cdf(s)


def test_kernel_edge_and_hole_prob(tmp_path):
    assert run(tmp_path, "kernel-edge", "--potential", "poly:0,0,2",
               "--n", "60", "--t-grid", "-1:1:1") == 0
    rec = json.loads((tmp_path / "kernel_edge.json").read_text())
    assert rec["sup_error"] < 0.05
    assert run(tmp_path, "hole-prob", "--potential", "poly:0,0,2",
               "--n", "80") == 0
    rec = json.loads((tmp_path / "hole_prob.json").read_text())
    assert 0.0 <= rec["E_n"] <= 1.0
    assert rec["difference"] < 0.2


def test_verify_insufficient_n(tmp_path):
    assert run(tmp_path, "verify", "--potential", "poly:0,0,2",
               "--n-list", "2") == 1
    rec = json.loads((tmp_path / "verify_summary.json").read_text())
    assert rec["passed"] is False
    assert "insufficient" in rec["reports"][0]["details"]["reason"]


def test_verify_small_sweep(tmp_path):
    rc = run(tmp_path, "verify", "--potential", "poly:0,0,2",
             "--n-list", "48,96")
    assert rc == 0
    rec = json.loads((tmp_path / "verify_summary.json").read_text())
    assert rec["passed"] is True
    names = {r["name"] for r in rec["reports"]}
    assert {"recurrence_asymptotics", "edge_kernel", "nu_convergence",
            "resolvent_comparison", "tail_mass", "hole_probability"} <= names
    assert (tmp_path / "verify_convergence.png").exists()


def test_byte_identical_outputs(tmp_path):
    d1 = tmp_path / "a"
    d2 = tmp_path / "b"
    for d in (d1, d2):
        d.mkdir()
        assert main(["equilibrium", "--potential", "poly:0,0,0,0,0.25",
                     "--out", str(d), "--no-plot"]) == 0
        assert main(["tw", "--s-range", "-1:0:0.5", "--out", str(d),
                     "--no-plot"]) == 0
    for name in ("equilibrium.json", "density.csv", "tw.csv", "tw_meta.json"):
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes()


def test_outputs_embed_hash_and_version(tmp_path):
    from edgelab import __version__
    assert run(tmp_path, "equilibrium", "--potential", "poly:0,0,2",
               "--no-plot") == 0
    rec = json.loads((tmp_path / "equilibrium.json").read_text())
    assert rec["meta"]["version"] == __version__
    assert len(rec["meta"]["config_hash"]) == 16


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("potential=poly:0,0,2\nn=30\nno_plot=true\n")
    out = tmp_path / "o"
    out.mkdir()
    assert main(["recurrence", "--config", str(cfg), "--out", str(out)]) == 0
    meta = json.loads((out / "recurrence_meta.json").read_text())
    assert meta["n"] == 30
    # command line wins over the config value
    assert main(["recurrence", "--config", str(cfg), "--n", "24",
                 "--out", str(out)]) == 0
    meta = json.loads((out / "recurrence_meta.json").read_text())
    assert meta["n"] == 24


def test_no_plot_skips_figures(tmp_path):
    assert run(tmp_path, "equilibrium", "--potential", "poly:0,0,2",
               "--no-plot") == 0
    assert not (tmp_path / "density.png").exists()
    assert (tmp_path / "density.csv").exists()
