"""Command-line front end.

Subcommands: equilibrium | recurrence | kernel-edge | tw | hole-prob | verify.
Each writes CSV/JSON into --out plus a PNG rendering of every table unless
--no-plot is given.  Outputs embed the config hash and package version; with
a fixed configuration and build the JSON/CSV bytes are reproducible (the
pipeline has no randomness and no timestamps).

Exit codes: 0 ok, 1 diagnostic failure, 2 usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__, diagnostics as dg, equilibrium as eqm, orthopoly as op
from .errors import EdgeLabError, PotentialFormatError
from .fredholm import hole_probability_finite_n, tw_cdf
from .potential import parse_potential
from . import plotting

_MIN_DIAG_N = 24


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def _write_json(path: Path, payload: dict, meta: dict):
    body = dict(payload)
    body["meta"] = meta
    path.write_text(json.dumps(_jsonable(body), sort_keys=True, indent=2) + "\n")


def _write_csv(path: Path, header: list[str], columns):
    rows = zip(*columns)
    lines = [",".join(header)]
    lines += [",".join(repr(float(v)) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def _config_hash(args: argparse.Namespace) -> str:
    # the hash covers the semantic configuration, not where files land
    skip = ("func", "out", "config", "no_plot")
    items = sorted((k, repr(v)) for k, v in vars(args).items() if k not in skip)
    blob = "\n".join(f"{k}={v}" for k, v in items)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _meta(args) -> dict:
    return {"version": __version__, "config_hash": _config_hash(args)}


def _parse_range(text: str):
    m = re.match(r"^(-?[\d.]+):(-?[\d.]+):([\d.]+)$", text)
    if not m:
        raise argparse.ArgumentTypeError(
            f"range {text!r} must be lo:hi:step with step > 0")
    lo, hi, step = map(float, m.groups())
    if step <= 0 or hi < lo:
        raise argparse.ArgumentTypeError("range needs hi >= lo and step > 0")
    count = int(round((hi - lo) / step))
    return np.linspace(lo, hi, count + 1)


def _parse_intervals(text: str):
    out = []
    for part in text.split(","):
        lo_s, hi_s = part.split(":")
        lo = float(lo_s)
        hi = math.inf if hi_s in ("inf", "+inf") else float(hi_s)
        out.append((lo, hi))
    return out


def _parse_n_list(text: str):
    ns = [int(tok) for tok in text.split(",")]
    if not ns or any(n <= 0 for n in ns):
        raise argparse.ArgumentTypeError("n-list must be positive integers")
    return ns


# ---------------------------------------------------------------------------
# subcommand bodies
# ---------------------------------------------------------------------------

def cmd_equilibrium(args) -> int:
    pot = parse_potential(args.potential)
    eq = eqm.solve_support(pot, args.kind)
    geom = eq.support
    selectors = ["right", "left"]
    if geom.kind == "TwoCut":
        selectors += ["inner-right", "inner-left"]
    edges = [eqm.edge_constants(eq, s) for s in selectors]
    record = {
        "kind": geom.kind,
        "a": geom.a,
        "b": geom.b,
        "shift": geom.shift,
        "p_coeffs": list(eq.p_coeffs),
        "potential": list(pot.coeffs),
        "edges": [{"which": s, "endpoint": e.endpoint, "side": e.side,
                   "c": e.c, "alpha": e.alpha, "gamma": e.gamma,
                   "kappa": e.kappa} for s, e in zip(selectors, edges)],
    }
    out = Path(args.out)
    _write_json(out / "equilibrium.json", record, _meta(args))
    ivs = geom.intervals()
    lo = min(i[0] for i in ivs) - 0.2
    hi = max(i[1] for i in ivs) + 0.2
    lam = np.linspace(lo, hi, 1201)
    rho = eqm.density(eq, lam)
    _write_csv(out / "density.csv", ["lambda", "rho"], [lam, rho])
    if not args.no_plot:
        plotting.plot_density(lam, rho, out / "density.png")
    return 0


def _build_table(pot, n, margin):
    grid = op.build_grid(pot, n, margin=margin)
    return op.recurrence_coefficients(grid, pot, n, margin=margin)


def cmd_recurrence(args) -> int:
    pot = parse_potential(args.potential)
    table = _build_table(pot, args.n, args.margin)
    out = Path(args.out)
    l = np.arange(table.n1)
    _write_csv(out / "recurrence.csv", ["l", "J", "q"], [l, table.J, table.q])
    meta = {
        "n": table.n, "n1": table.n1, "L": table.grid.L,
        "nodes": len(table.grid.nodes), "mu0": table.mu0,
        "v_offset": table.v_offset, "q_drift": table.q_drift,
        "potential": list(pot.coeffs),
    }
    _write_json(out / "recurrence_meta.json", meta, _meta(args))
    if not args.no_plot:
        plotting.plot_recurrence(l, table.J, table.q, out / "recurrence.png")
    return 0


def cmd_kernel_edge(args) -> int:
    pot = parse_potential(args.potential)
    eq = eqm.solve_support(pot, args.kind)
    edge = eqm.edge_constants(eq, args.edge)
    table = _build_table(pot, args.n, args.margin)
    t = args.t_grid
    from .airy import airy_kernel
    from .fredholm import rescaled_kernel
    kn = rescaled_kernel(table, edge)(t)
    ka = airy_kernel(t[:, None], t[None, :])
    err = np.abs(kn - ka)
    out = Path(args.out)
    t1g, t2g = np.meshgrid(t, t, indexing="ij")
    _write_csv(out / "kernel_edge.csv",
               ["t1", "t2", "kernel_n", "kernel_airy", "abs_err"],
               [t1g.ravel(), t2g.ravel(), kn.ravel(), ka.ravel(), err.ravel()])
    _write_json(out / "kernel_edge.json",
                {"n": args.n, "edge": args.edge, "sup_error": float(err.max()),
                 "t_grid": list(map(float, t))}, _meta(args))
    if not args.no_plot:
        plotting.plot_kernel_edge(t, err, out / "kernel_edge.png")
    return 0


def cmd_tw(args) -> int:
    s_vals = args.s_range
    out = Path(args.out)
    f2 = np.empty_like(s_vals)
    sidecar = []
    for i, s in enumerate(s_vals):
        history = []
        f2[i] = tw_cdf(float(s), tol=args.tol, quad_order=args.quad_order,
                       history=history)
        from .fredholm import airy_tail_cut
        sidecar.append({"s": float(s), "det": f2[i],
                        "quad_order": history[-1]["quad_order"],
                        "truncation_T": airy_tail_cut(float(s)),
                        "refinement_history": history})
    _write_csv(out / "tw.csv", ["s", "F2"], [s_vals, f2])
    _write_json(out / "tw_meta.json", {"points": sidecar}, _meta(args))
    if not args.no_plot:
        plotting.plot_tw(s_vals, f2, out / "tw.png")
    return 0


def cmd_hole_prob(args) -> int:
    pot = parse_potential(args.potential)
    eq = eqm.solve_support(pot, args.kind)
    edge = eqm.edge_constants(eq, args.edge)
    table = _build_table(pot, args.n, args.margin)
    history = []
    e_n = hole_probability_finite_n(table, edge, args.interval,
                                    quad_order=args.quad_order,
                                    history=history)
    record = {"n": args.n, "edge": args.edge,
              "intervals": [[lo, hi] for lo, hi in args.interval],
              "E_n": e_n, "refinement_history": history}
    if len(args.interval) == 1 and math.isinf(args.interval[0][1]):
        f2 = tw_cdf(args.interval[0][0], quad_order=args.quad_order)
        record["F2_limit"] = f2
        record["difference"] = abs(e_n - f2)
    out = Path(args.out)
    _write_json(out / "hole_prob.json", record, _meta(args))
    if not args.no_plot:
        plotting.plot_refinement(history, out / "hole_prob.png",
                                 title="hole probability refinement")
    return 0


def cmd_verify(args) -> int:
    pot = parse_potential(args.potential)
    n_list = sorted(args.n_list)
    out = Path(args.out)
    if min(n_list) < _MIN_DIAG_N:
        report = dg.ConvergenceReport(
            "verify", n_list, [], None, False,
            {"reason": f"insufficient n: diagnostics need n >= {_MIN_DIAG_N}"})
        _write_json(out / "verify_summary.json",
                    {"passed": False, "reports": [json.loads(report.to_json())]},
                    _meta(args))
        print("verify: FAIL (insufficient n)")
        return 1

    eq = eqm.solve_support(pot, args.kind)
    edge = eqm.edge_constants(eq, args.edge)
    tables = [_build_table(pot, n, args.margin) for n in n_list]
    edges = [edge] * len(tables)

    t_grid = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
    s_grid = np.linspace(-2.0, 2.0, 41)
    reports = [
        dg.recurrence_asymptotics_report(tables, eq, edge),
        dg.edge_kernel_report(tables, edges, t_grid),
        dg.nu_report(tables, edges, s_grid),
        dg.resolvent_report(tables, eq, args.edge),
        dg.tail_report(tables[-1], edge, l0_values=(2.0, 4.0)),
    ]
    # hole probability against the limit law at the largest size
    hist = []
    e_n = hole_probability_finite_n(tables[-1], edge, [(0.0, math.inf)],
                                    history=hist)
    f2 = tw_cdf(0.0)
    tol = 0.05 if max(n_list) >= 300 else 0.12
    reports.append(dg.ConvergenceReport(
        "hole_probability", [tables[-1].n], [abs(e_n - f2)], None,
        abs(e_n - f2) <= tol,
        {"E_n": e_n, "F2_limit": f2, "tolerance": tol}))

    all_pass = all(r.passed for r in reports)
    for rep in reports:
        _write_json(out / f"verify_{rep.name}.json",
                    json.loads(rep.to_json()), _meta(args))
        flag = "PASS" if rep.passed else "FAIL"
        print(f"verify: {rep.name}: {flag}")
    _write_json(out / "verify_summary.json",
                {"passed": all_pass,
                 "reports": [json.loads(r.to_json()) for r in reports]},
                _meta(args))
    if not args.no_plot:
        plotting.plot_convergence(reports, out / "verify_convergence.png")
    print(f"verify: {'PASS' if all_pass else 'FAIL'}")
    return 0 if all_pass else 1


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------

def _load_config(path: str) -> dict:
    cfg = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise argparse.ArgumentTypeError(
                f"config line {raw!r} is not key=value")
        key, val = line.split("=", 1)
        cfg[key.strip().replace("-", "_")] = val.strip()
    return cfg


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edge-lab",
        description="equilibrium measures, varying-weight orthogonal "
                    "polynomials, Airy-kernel determinants, and edge "
                    "universality diagnostics for polynomial matrix models")
    parser._negative_number_matcher = re.compile(r"^-\d")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, potential=True):
        p._negative_number_matcher = re.compile(r"^-\d")
        if potential:
            p.add_argument("--potential", help="poly:c0,c1,...,cd")
            p.add_argument("--kind", default="auto",
                           choices=["auto", "one", "two"])
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--config", help="flat key=value config file")
        p.add_argument("--no-plot", action="store_true",
                       help="skip PNG rendering")
        p.add_argument("--margin", type=float, default=2.0,
                       help="growth margin; table length n1 = n(1+margin/4)")

    p = sub.add_parser("equilibrium", help="support, density, edge constants")
    common(p)
    p.set_defaults(func=cmd_equilibrium)

    p = sub.add_parser("recurrence", help="three-term recurrence table")
    common(p)
    p.add_argument("--n", type=int)
    p.set_defaults(func=cmd_recurrence, _required=("n",))

    p = sub.add_parser("kernel-edge", help="rescaled kernel vs Airy kernel")
    common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--edge", default="right", choices=["right", "left"])
    p.add_argument("--t-grid", type=_parse_range,
                   default=_parse_range("-2:2:1"),
                   help="lo:hi:step grid in the edge variable")
    p.set_defaults(func=cmd_kernel_edge, _required=("n",))

    p = sub.add_parser("tw", help="largest-eigenvalue limit law table")
    common(p, potential=False)
    p.add_argument("--s-range", type=_parse_range, help="lo:hi:step")
    p.add_argument("--quad-order", type=int, default=80)
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_tw, _required=("s_range",))

    p = sub.add_parser("hole-prob", help="finite-n edge hole probability")
    common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--edge", default="right", choices=["right", "left"])
    p.add_argument("--interval", type=_parse_intervals,
                   default=_parse_intervals("0:inf"),
                   help="comma list of lo:hi in the edge variable, hi may be inf")
    p.add_argument("--quad-order", type=int, default=80)
    p.set_defaults(func=cmd_hole_prob, _required=("n",))

    p = sub.add_parser("verify", help="full diagnostic sweep, CI-friendly")
    common(p)
    p.add_argument("--n-list", type=_parse_n_list,
                   help="comma-separated sizes, e.g. 100,200,400")
    p.add_argument("--edge", default="right", choices=["right", "left"])
    p.set_defaults(func=cmd_verify, _required=("n_list",))
    return parser


_CONFIG_CASTS = {
    "n": int, "quad_order": int, "tol": float, "margin": float,
    "n_list": _parse_n_list, "s_range": _parse_range,
    "t_grid": _parse_range, "interval": _parse_intervals,
    "no_plot": lambda s: s.lower() in ("1", "true", "yes"),
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "config", None):
        try:
            cfg = _load_config(args.config)
        except (OSError, argparse.ArgumentTypeError) as exc:
            print(f"edge-lab: config error: {exc}", file=sys.stderr)
            return 2
        # command-line flags take precedence over config entries
        given = set()
        for tok in (argv if argv is not None else sys.argv[1:]):
            if isinstance(tok, str) and tok.startswith("--"):
                given.add(tok.split("=", 1)[0][2:].replace("-", "_"))
        for key, raw in cfg.items():
            if key in given or not hasattr(args, key):
                continue
            cast = _CONFIG_CASTS.get(key, str)
            try:
                setattr(args, key, cast(raw))
            except (ValueError, argparse.ArgumentTypeError) as exc:
                print(f"edge-lab: config error for {key}: {exc}",
                      file=sys.stderr)
                return 2
    if getattr(args, "potential", "x") is None:
        print("edge-lab: --potential is required (flag or config)",
              file=sys.stderr)
        return 2
    for key in getattr(args, "_required", ()):
        if getattr(args, key) is None:
            flag = "--" + key.replace("_", "-")
            print(f"edge-lab: {flag} is required (flag or config)",
                  file=sys.stderr)
            return 2
    Path(args.out).mkdir(parents=True, exist_ok=True)
    try:
        return args.func(args)
    except PotentialFormatError as exc:
        print(f"edge-lab: invalid potential: {exc}", file=sys.stderr)
        return 2
    except EdgeLabError as exc:
        print(f"edge-lab: numerical failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"edge-lab: invalid input: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
