"""``melonrg`` command line.

Exit codes: 0 success, 1 computation failure, 2 invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import census, graphs, ifmaps, series
from .cutoffs import CutoffFamily, beta2_integral, beta_coefficients
from .flow import (
    DOMAIN_KINDS,
    DomainSpec,
    FlowError,
    FlowProblem,
    domain_radius,
    integrate,
    sample_domain,
)
from .sde import ModelParams, SolverError, bare_mass_sq, delta_m, effective_constants, solve_sigma_mr
from .verify import run_suite


class InputError(Exception):
    pass


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("MELONRG_THREADS", "1")))
    except ValueError:
        raise InputError("MELONRG_THREADS must be an integer")


def _fmt(x) -> str:
    return repr(float(x))


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _load_json(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}")


def _range(text):
    try:
        a, b = text.split("..")
        return range(int(a), int(b) + 1)
    except ValueError:
        raise InputError(f"bad range {text!r}, expected like 3..8")


# ---------------------------------------------------------------------------

def cmd_graph(args):
    if args.action == "analyze":
        try:
            g = graphs.ColouredGraph.from_json(_load_json(args.input))
        except graphs.GraphError as exc:
            raise InputError(f"{args.input}: {exc}")
        fc = graphs.face_counts(g)
        report = {
            "E": g.n_external,
            "C_boundary": graphs.boundary_components(g),
            "F": fc.F,
            "F0": fc.F0,
            "vertices": g.n_vertices,
            "internal_edges": g.n_internal,
            "external_edges": g.n_external,
            "components": g.n_components,
            "degree": str(graphs.gurau_degree(g)),
            "degree_face_consistency": graphs.degree_face_consistency(g),
        }
        try:
            cls = graphs.classify(g).to_json()
            report.update(degree=cls["degree"], omega=cls["omega"], family=cls["family"])
        except graphs.GraphError as exc:
            report.update(omega=None, family=None, note=str(exc))
        _emit(json.dumps(report, indent=2, sort_keys=True) + "\n", args.out)
        return 0
    # census
    if args.max_order < 1 or args.max_order > 5:
        raise InputError("--max-order must be in 1..5")
    entries = census.generate(args.max_order, melonic=args.melonic)
    rows = []
    for e in entries:
        c = graphs.classify(e.graph())
        rows.append([e.order, c.external_count, c.boundary_components, str(c.gurau_degree),
                     c.divergence_degree, c.family, " ".join(map(str, e.colours)),
                     " ".join(map(str, e.zero))])
    _emit(_csv(["order", "E", "C_boundary", "degree", "omega", "family", "colours", "zero_edges"], rows),
          args.out)
    return 0


def cmd_ifmap(args):
    data = _load_json(args.input)
    if args.action == "convert":
        try:
            if "parity" in json.dumps(data):
                m = ifmaps.to_if_map(graphs.ColouredGraph.from_json(data))
                text = json.dumps(m.to_json(), sort_keys=True)
            else:
                g = ifmaps.from_if_map(ifmaps.ColouredMap.from_json(data))
                text = json.dumps(g.to_json(), sort_keys=True)
        except (graphs.GraphError, ifmaps.MapError) as exc:
            raise InputError(f"{args.input}: {exc}")
        _emit(text + "\n", args.out)
        return 0
    try:
        m = ifmaps.ColouredMap.from_json(data)
    except ifmaps.MapError as exc:
        raise InputError(f"{args.input}: {exc}")
    c = ifmaps.classify_if(m)
    _emit(json.dumps(c.to_json(), sort_keys=True) + "\n", args.out)
    return 0


def cmd_series(args):
    if args.order < 1:
        raise InputError("--order must be >= 1")
    if args.action == "gamma4":
        s = series.gamma4_gf_series(args.order)
        header = ["n", "coefficient", "asymptotic", "ratio"]
        rows = []
        for n in range(1, args.order + 1):
            asym = series.gamma4_asymptotic(n)
            rows.append([n, int(s[n]), _fmt(asym), _fmt(int(s[n]) / asym)])
    else:
        s = series.sigma_gf_series(args.order)
        header = ["n", "coefficient"]
        rows = [[n, int(s[n])] for n in range(1, args.order + 1)]
    if args.format == "json":
        _emit(json.dumps([dict(zip(header, r)) for r in rows]) + "\n", args.out)
    else:
        _emit(_csv(header, rows), args.out)
    return 0


def _params_from(args) -> ModelParams:
    cfg = {}
    if args.config:
        cfg = _load_json(args.config)
        if not isinstance(cfg, dict):
            raise InputError(f"{args.config}: expected a JSON object")
    for k in ("M", "j_max", "a", "eps", "m_r_sq", "g_b", "Z_b", "tol"):
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = v
    if "g_b" not in cfg:
        raise InputError("g_b missing (use --g-b or a config file)")
    try:
        return ModelParams.from_json(cfg), float(cfg.get("tol", 1e-12))
    except (TypeError, ValueError) as exc:
        raise InputError(str(exc))


def cmd_sde(args):
    p, tol = _params_from(args)
    table = solve_sigma_mr(p, tol)
    eff = effective_constants(p, table)
    out = table.to_json()
    out["delta_m"] = delta_m(p, table)
    out["m_b_sq"] = bare_mass_sq(p, table)
    out["effective"] = [{"j": j, "Z": z, "gZ2": gz, "g": g} for j, z, gz, g in eff.rows()]
    out["tolerance"] = tol
    _emit(json.dumps(out, indent=2, sort_keys=True) + "\n", args.out)
    return 0


def _cutoffs(args) -> CutoffFamily:
    try:
        return CutoffFamily(args.M, args.j_max, args.a, args.eps)
    except ValueError as exc:
        raise InputError(str(exc))


def cmd_beta(args):
    if args.action == "beta2":
        c = _cutoffs(args)
        _emit(_csv(["M", "beta2", "rel_tol"], [[c.M, _fmt(beta2_integral(c)), "1e-10"]]), args.out)
        return 0
    js = _range(args.j_range)
    c = _cutoffs(args).with_j_max(max(args.j_max, max(js) + 2))
    b2 = beta2_integral(c)
    rows = []
    for j in js:
        b = beta_coefficients(c, args.m_r_sq, j)
        rows.append([j, _fmt(b.K_j), _fmt(b.A_diff), _fmt(b.A_tilde_diff), _fmt(b.beta_j), _fmt(b2),
                     _fmt(abs(b.beta_j - b2))])
    _emit(_csv(["j", "K_j", "A", "A_tilde", "beta_j", "beta2", "abs_diff"], rows), args.out)
    return 0


def cmd_flow(args):
    if args.action == "run":
        try:
            higher = tuple(float(x) for x in args.higher.split(",")) if args.higher else ()
            fp = FlowProblem(args.beta2, args.beta3, higher, complex(args.g_re, args.g_im))
        except ValueError as exc:
            raise InputError(str(exc))
        if not args.T > 0 or not args.tol > 0:
            raise InputError("--T and --tol must be positive")
        ts = np.linspace(0.0, args.T, args.samples)
        tr = integrate(fp, args.T, args.tol, t_eval=ts, escape_radius=args.escape)
        rows = [[_fmt(t), _fmt(g.real), _fmt(g.imag)] for t, g in zip(tr.t, tr.g)]
        text = _csv(["t", "re_g", "im_g"], rows)
        _emit(text, args.out)
        if tr.escaped:
            print(f"trajectory escaped at t={tr.t[-1]:.6g}", file=sys.stderr)
        return 0
    if args.action == "domains":
        try:
            d = DomainSpec(args.kind, args.eps, args.beta32)
        except ValueError as exc:
            raise InputError(str(exc))
        th = np.linspace(-math.pi, math.pi, 721)
        rows = [["boundary", _fmt(domain_radius(d, t) * math.cos(t)), _fmt(domain_radius(d, t) * math.sin(t))]
                for t in th]
        z = sample_domain(d, args.samples, np.random.default_rng(args.seed))
        rows += [["sample", _fmt(w.real), _fmt(w.imag)] for w in z]
        _emit(_csv(["kind", "re", "im"], rows), args.out)
        return 0
    return _report(run_suite("flow", args.seed), args)


def _report(checks, args):
    if getattr(args, "json", False):
        _emit(json.dumps([c.to_json() for c in checks], indent=2) + "\n", args.out)
    else:
        _emit("".join(c.line() + "\n" for c in checks), args.out)
    return 0 if all(c.passed for c in checks) else 1


def cmd_verify(args):
    return _report(run_suite(args.suite, args.seed), args)


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="melonrg", description="Melonic tensor-field RG toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    def out(p):
        p.add_argument("--out", "-o", default=None, help="output file (default stdout)")

    g = sub.add_parser("graph", help="coloured graphs")
    g.add_argument("action", choices=["analyze", "census"])
    g.add_argument("input", nargs="?")
    g.add_argument("--max-order", type=int, default=3)
    g.add_argument("--melonic", action="store_true")
    out(g)

    m = sub.add_parser("ifmap", help="intermediate-field maps")
    m.add_argument("action", choices=["convert", "classify"])
    m.add_argument("input")
    out(m)

    s = sub.add_parser("series", help="generating functions")
    s.add_argument("action", choices=["gamma4", "sigma"])
    s.add_argument("--order", type=int, default=20)
    s.add_argument("--format", choices=["csv", "json"], default="csv")
    out(s)

    def cut(p, j_max=2):
        p.add_argument("--M", type=int, default=2)
        p.add_argument("--j-max", dest="j_max", type=int, default=j_max)
        p.add_argument("--a", type=float, default=2.5)
        p.add_argument("--eps", type=float, default=1.5)

    d = sub.add_parser("sde", help="self-energy fixed point")
    d.add_argument("action", choices=["solve"])
    d.add_argument("--config")
    d.add_argument("--M", type=int)
    d.add_argument("--j-max", dest="j_max", type=int)
    d.add_argument("--a", type=float)
    d.add_argument("--eps", type=float)
    d.add_argument("--m-r-sq", dest="m_r_sq", type=float)
    d.add_argument("--g-b", dest="g_b", type=float)
    d.add_argument("--Z-b", dest="Z_b", type=float)
    d.add_argument("--tol", type=float)
    out(d)

    b = sub.add_parser("beta", help="one-loop beta coefficients")
    b.add_argument("action", choices=["table", "beta2"])
    cut(b, j_max=10)
    b.add_argument("--m-r-sq", dest="m_r_sq", type=float, default=1.0)
    b.add_argument("--j-range", default="1..8")
    out(b)

    f = sub.add_parser("flow", help="complex RG flows")
    f.add_argument("action", choices=["run", "domains", "verify"])
    f.add_argument("--beta2", type=float, default=-1.0)
    f.add_argument("--beta3", type=float, default=0.0)
    f.add_argument("--higher", default="")
    f.add_argument("--g-re", dest="g_re", type=float, default=0.1)
    f.add_argument("--g-im", dest="g_im", type=float, default=0.0)
    f.add_argument("--T", type=float, default=10.0)
    f.add_argument("--tol", type=float, default=1e-10)
    f.add_argument("--samples", type=int, default=201)
    f.add_argument("--escape", type=float, default=None)
    f.add_argument("--kind", choices=DOMAIN_KINDS, default="omega")
    f.add_argument("--eps", type=float, default=0.5)
    f.add_argument("--beta32", type=float, default=0.0)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--json", action="store_true")
    out(f)

    v = sub.add_parser("verify", help="run property suites")
    v.add_argument("--suite", choices=["all", "graphs", "series", "sde", "flow"], default="all")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--json", action="store_true")
    out(v)
    return ap


HANDLERS = {"graph": cmd_graph, "ifmap": cmd_ifmap, "series": cmd_series, "sde": cmd_sde,
            "beta": cmd_beta, "flow": cmd_flow, "verify": cmd_verify}


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        _threads()
        if args.command == "graph" and args.action == "analyze" and not args.input:
            raise InputError("graph analyze needs an input file")
        return HANDLERS[args.command](args)
    except InputError as exc:
        print(f"melonrg: error: {exc}", file=sys.stderr)
        return 2
    except (SolverError, FlowError, ArithmeticError, graphs.GraphError, ifmaps.MapError) as exc:
        print(f"melonrg: computation failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
