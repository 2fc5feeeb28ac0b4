"""Property checks tying the modules together; used by ``melonrg verify``."""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass

import numpy as np

from . import census, graphs, ifmaps, series
from .cutoffs import CutoffFamily, beta2_integral, beta_coefficients
from .flow import (
    DomainSpec,
    FlowProblem,
    cubic_phi,
    domain_contains,
    integrate,
    phi_residual,
    quadratic_exact,
    sample_domain,
)
from .normal_forms import pushforward_residual, szekeres_normal_form, time_one_map, vector_field_log
from .sde import ModelParams, solve_sigma_mr


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""
    tolerance: str = "exact"
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}  [{self.tolerance}]  {self.detail}"

    def to_json(self):
        return {"name": self.name, "passed": self.passed, "detail": self.detail,
                "tolerance": self.tolerance, "seconds": round(self.seconds, 3)}


def _timed(name, tol, fn):
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failed check, reported as such
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return Check(name, bool(ok), detail, tol, time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# graphs
# ---------------------------------------------------------------------------

def census_graph_report(g: graphs.ColouredGraph):
    """(omega matches -2L+F0, degree matches faces, graph/map classes agree)."""
    deg = graphs.gurau_degree(g)
    omega = graphs._omega(g, deg)
    ok_omega = omega == graphs.divergence_degree_from_faces(g)
    ok_faces = deg == graphs.face_formula_degree(g)
    cls = graphs.DivergenceClass(g.n_external, graphs.boundary_components(g), deg, omega,
                                 graphs.family_tag(g.n_external, deg, omega))
    ok_map = cls == ifmaps.classify_if(ifmaps.to_if_map(g))
    return ok_omega, ok_faces, ok_map


def census_cross_validation(max_order: int = 4):
    entries = census.generate(max_order)
    bad = {"omega": 0, "faces": 0, "map": 0}
    for e in entries:
        o, f, m = census_graph_report(e.graph())
        bad["omega"] += not o
        bad["faces"] += not f
        bad["map"] += not m
    return len(entries), bad


def divergence_table_rows():
    """Representatives for each divergent row: (E, C_boundary, degree, omega)."""
    return [
        ("four-point melon", graphs.fundamental_four_point_melon(1), (4, 1, 0, 0)),
        ("two-point melon", graphs.fundamental_two_point_melon(1), (2, 1, 0, 2)),
        ("vacuum melon", graphs.fundamental_vacuum_melon(1), (0, 0, 0, 5)),
        ("monochrome necklace", graphs.necklace([1, 1, 1]), (0, 0, 3, 2)),
        ("mixed necklace", graphs.necklace([1, 2, 3]), (0, 0, 5, 0)),
    ]


def suite_graphs(max_order: int = 4, seed: int = 0):
    out = []

    def table():
        miss = []
        for name, g, want in divergence_table_rows():
            c = graphs.classify(g)
            got = (c.external_count, c.boundary_components, int(c.gurau_degree), c.divergence_degree)
            if got != want:
                miss.append(f"{name}: {got} != {want}")
        return not miss, "; ".join(miss) or "5 rows"

    out.append(_timed("divergence table", "exact", table))

    def cross():
        n, bad = census_cross_validation(max_order)
        return not any(bad.values()), f"{n} graphs up to order {max_order}, failures {bad}"

    out.append(_timed(f"census cross-validation (order <= {max_order})", "exact", cross))

    def random_big():
        rng = random.Random(seed)
        n = 0
        for order in (5, 6):
            for _ in range(500):
                g = census.random_gluing(order, rng)
                if not graphs.degree_face_consistency(g):
                    return False, f"degree/face mismatch at order {order}"
                n += 1
        return True, f"{n} random gluings"

    out.append(_timed("degree/face formula on random gluings", "exact", random_big))
    return out


# ---------------------------------------------------------------------------
# series
# ---------------------------------------------------------------------------

def suite_series(census_order: int = 5):
    out = []

    def two_point():
        bad = [n for n in range(1, 9)
               if series.enumerate_melonic_2pt(n) != 5 ** (n - 1) * series.catalan(n - 1)]
        return not bad, f"n=1..8, mismatches {bad}"

    out.append(_timed("melonic 2-point enumeration", "exact", two_point))

    def gamma4():
        gf = series.gamma4_gf_series(census_order)
        counts = census.gamma4_census(census_order)
        want = [int(gf[n]) for n in range(1, census_order + 1)]
        got = [counts[n] for n in range(1, census_order + 1)]
        return got == want, f"census {got} vs series {want}"

    out.append(_timed(f"Gamma4 series vs census (order <= {census_order})", "exact", gamma4))

    def asym():
        gf = series.gamma4_gf_series(100)
        r = float(gf[100]) / series.gamma4_asymptotic(100)
        return abs(r - 1) <= 0.05, f"ratio at n=100: {r:.6f}"

    out.append(_timed("Gamma4 asymptotic ratio", "5%", asym))
    return out


# ---------------------------------------------------------------------------
# cutoffs / sde / beta
# ---------------------------------------------------------------------------

def suite_sde():
    out = []
    c = CutoffFamily(2, 8)

    def partition():
        rng = np.random.default_rng(0)
        u = rng.uniform(0, c.support * c.scale(c.j_max) * 1.1, 1000)
        s = sum(c.eta(u, j) for j in range(c.j_max + 1))
        err = float(np.max(np.abs(s - c.kappa(u, c.j_max))))
        far = max(float(np.max(np.abs(c.eta(u, i) * c.eta(u, j))))
                  for i in range(c.j_max + 1) for j in range(i + 2, c.j_max + 1))
        return err <= 1e-14 and far <= 1e-14, f"sum error {err:.1e}, disjoint-slice product {far:.1e}"

    out.append(_timed("cutoff partition of unity", "1e-14", partition))

    def sigma():
        worst = 0.0
        for jm in (1, 2):
            for g in (-0.05, 0.01):
                t = solve_sigma_mr(ModelParams(g, 1.0, 1.0, CutoffFamily(2, jm)))
                a = np.asarray(t.array)
                if t[0] != 0.0 or not np.array_equal(a, a[::-1]):
                    return False, "sigma(0) or reflection symmetry broken"
                worst = max(worst, t.residual)
        return worst <= 1e-12, f"max residual {worst:.1e}"

    out.append(_timed("self-energy fixed point", "1e-12", sigma))

    def beta():
        vals = []
        for M in (2, 3):
            cc = CutoffFamily(M, 10)
            b2 = beta2_integral(cc)
            vals.append(b2)
            if not b2 < 0:
                return False, f"beta2 = {b2} at M={M}"
        cc = CutoffFamily(2, 10)
        b2 = vals[0]
        js = np.arange(3, 9)
        d = [abs(beta_coefficients(cc, 1.0, int(j)).beta_j - b2) for j in js]
        rate = -np.polyfit(js, np.log(d), 1)[0]
        ok = all(x > y for x, y in zip(d, d[1:])) and rate >= math.log(2) - 0.2
        return ok, f"beta2(M=2)={vals[0]:.6f}, beta2(M=3)={vals[1]:.6f}, rate {rate:.3f}"

    out.append(_timed("beta2 sign and beta_j convergence", "rate >= log M - 0.2", beta))
    return out


# ---------------------------------------------------------------------------
# flow
# ---------------------------------------------------------------------------

def suite_flow(seed: int = 0, n_samples: int = 2000):
    out = []
    rng = np.random.default_rng(seed)

    def quad():
        fp = FlowProblem(-1.0, 0.0, (), 0.3 + 0.2j)
        ts = np.linspace(0, 100, 1001)
        tr = integrate(fp, 100.0, 1e-10, t_eval=ts)
        err = float(np.max(np.abs(tr.g - quadratic_exact(-1.0, fp.g_r, ts))))
        return err < 1e-8, f"max error {err:.2e}"

    out.append(_timed("quadratic flow vs closed form", "1e-8", quad))

    def omega_bound():
        eps = 0.5
        z = sample_domain(DomainSpec("omega", eps), n_samples, rng)
        ts = np.linspace(0, 1000, 2001)
        worst = 0.0
        for t in ts:
            worst = max(worst, float(np.max(np.abs(z / (1.0 + z * t)))))
        return worst <= eps * (1 + 1e-9), f"max |g| / eps = {worst / eps:.9f}"

    out.append(_timed("quadratic flow bounded on Omega_eps", "1+1e-9", omega_bound))

    def phi():
        fp = FlowProblem(-1.0, 0.5, (), 0.0)
        eps = 0.1
        z = sample_domain(DomainSpec("omega", eps), 200, rng)
        ts = np.linspace(0, 200, 401)
        ph = cubic_phi(fp, ts, g_r=z)
        res = phi_residual((-fp.beta2 * z)[:, None], (fp.beta32 * z)[:, None], ts, ph)
        return float(np.max(np.abs(ph))) < 2 * math.pi and float(np.max(res)) < 1e-10, \
            f"max |phi| {np.max(np.abs(ph)):.3f}, max residual {np.max(res):.1e}"

    out.append(_timed("cubic correction phi bounded", "1e-10", phi))

    def normal_forms():
        h = [0, 1, 2, 3, 5]
        X = vector_field_log(h, 10)
        back = time_one_map(X)
        ok = back.coeffs[:5] == [series.Fraction(c) for c in h] and not any(back.coeffs[5:])
        nf = szekeres_normal_form(-1, 1, [1, -2], 10)
        ok2 = pushforward_residual(nf, -1, 1, [1, -2]).is_zero()
        return ok and ok2, "log round trip and Szekeres residual"

    out.append(_timed("normal forms", "exact", normal_forms))

    def domains():
        z = sample_domain(DomainSpec("cardioid", 1.0), n_samples, rng)
        om = DomainSpec("omega", 1.0)
        bad = sum(not domain_contains(om, w) for w in z)
        return bad == 0, f"{bad} cardioid samples outside Omega"

    out.append(_timed("cardioid inside Omega", "exact", domains))
    return out


SUITES = {"graphs": suite_graphs, "series": suite_series, "sde": suite_sde, "flow": suite_flow}


def run_suite(name: str, seed: int = 0):
    if name == "all":
        out = []
        for k in SUITES:
            out.extend(run_suite(k, seed))
        return out
    fn = SUITES[name]
    if name in ("graphs", "flow"):
        return fn(seed=seed)
    return fn()
