"""Mass-renormalised melonic self-energy at finite cutoff, the mass
counterterm and the effective constants Z_j, g_j Z_j^2."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from .cutoffs import CutoffFamily

N_COLOURS = 5


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class ModelParams:
    g_b: float
    m_r_sq: float = 1.0
    Z_b: float = 1.0
    cutoffs: CutoffFamily = field(default_factory=CutoffFamily)

    def __post_init__(self):
        if not self.m_r_sq > 0:
            raise ValueError("m_r_sq must be positive")
        if not self.Z_b > 0:
            raise ValueError("Z_b must be positive")

    @property
    def coupling(self) -> float:
        return self.g_b * self.Z_b * self.Z_b

    def replace(self, **kw):
        d = dict(g_b=self.g_b, m_r_sq=self.m_r_sq, Z_b=self.Z_b, cutoffs=self.cutoffs)
        d.update(kw)
        return ModelParams(**d)

    def to_json(self):
        c = self.cutoffs
        return {"M": c.M, "j_max": c.j_max, "a": c.a, "eps": c.eps,
                "m_r_sq": self.m_r_sq, "g_b": self.g_b, "Z_b": self.Z_b}

    @classmethod
    def from_json(cls, d):
        c = CutoffFamily(int(d.get("M", 2)), int(d.get("j_max", 2)),
                         float(d.get("a", 2.5)), float(d.get("eps", 1.5)))
        return cls(float(d["g_b"]), float(d.get("m_r_sq", 1.0)), float(d.get("Z_b", 1.0)), c)


class _Lattice:
    """Points q in Z^4 with q^2 inside the cutoff support, plus 1D tables."""

    def __init__(self, c: CutoffFamily):
        self.N = c.N
        self.kcap = int(math.floor(c.support * c.scale(c.j_max)))
        axis = np.arange(-self.N, self.N + 1)
        grids = np.meshgrid(axis, axis, axis, axis, indexing="ij")
        q2 = sum(g * g for g in grids).ravel()
        keep = q2 <= self.kcap
        self.q2 = q2[keep]
        # column indices into the sigma array (momentum n sits at n + N)
        self.idx = np.stack([g.ravel()[keep] + self.N for g in grids])
        self.n = axis
        self.k = np.arange(self.kcap + 1, dtype=float)

    def profile(self, weights_1d: np.ndarray, n2: int) -> np.ndarray:
        """weights_1d indexed by the integer p^2, evaluated at n^2 + q^2 (0 beyond kcap)."""
        k = n2 + self.q2
        out = np.zeros(k.shape)
        ok = k <= self.kcap
        out[ok] = weights_1d[k[ok]]
        return out


@lru_cache(maxsize=8)
def _lattice(c: CutoffFamily) -> _Lattice:
    return _Lattice(c)


@dataclass(frozen=True)
class SelfEnergyTable:
    momenta: tuple
    array: np.ndarray = field(repr=False)
    params: ModelParams
    residual: float
    iterations: int = 0

    @property
    def values(self) -> dict:
        return {int(n): float(v) for n, v in zip(self.momenta, self.array)}

    def __getitem__(self, n: int) -> float:
        N = len(self.momenta) // 2
        if abs(n) > N:
            return 0.0
        return float(self.array[n + N])

    def to_json(self):
        return {"params": self.params.to_json(), "residual": self.residual,
                "iterations": self.iterations,
                "sigma": [[int(n), float(v)] for n, v in zip(self.momenta, self.array)]}


def _tadpole(p: ModelParams, lat: _Lattice, sigma: np.ndarray, weights: np.ndarray,
             sigma_den: np.ndarray | None = None) -> np.ndarray:
    """T(n) = sum_q w(n^2 + q^2) / (Z (n^2+q^2) + m^2 - s(n) - sum_i s(q_i)) for every n.

    ``sigma_den`` is the self-energy used in the denominator (defaults to sigma).
    """
    s = sigma if sigma_den is None else sigma_den
    S = s[lat.idx[0]] + s[lat.idx[1]] + s[lat.idx[2]] + s[lat.idx[3]]
    out = np.empty(len(lat.n))
    for i, n in enumerate(lat.n):
        n2 = int(n * n)
        w = lat.profile(weights, n2)
        den = p.Z_b * (n2 + lat.q2) + p.m_r_sq - s[i] - S
        live = w != 0
        if np.any(den[live] <= 0):
            raise SolverError("non-positive propagator denominator (mass too small for this coupling)")
        out[i] = np.sum(w[live] / den[live])
    return out


def sigma_map(p: ModelParams, sigma: np.ndarray) -> np.ndarray:
    """One application of the closed self-energy equation."""
    c = p.cutoffs
    lat = _lattice(c)
    w = c.kappa(lat.k, c.j_max)
    T = _tadpole(p, lat, sigma, w)
    return -p.coupling * (T - T[lat.N])


def solve_sigma_mr(p: ModelParams, tol: float = 1e-12, max_iter: int = 10_000) -> SelfEnergyTable:
    """Picard iteration for sigma_mr; damping 1/2 switches on once the residual grows."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    lat = _lattice(p.cutoffs)
    sigma = np.zeros(len(lat.n))
    damp = 1.0
    last = math.inf
    for it in range(max_iter + 1):
        new = sigma_map(p, sigma)
        res = float(np.max(np.abs(new - sigma)))
        if not math.isfinite(res):
            raise SolverError("self-energy iteration produced non-finite values")
        if res <= tol:
            sigma.flags.writeable = False
            return SelfEnergyTable(tuple(int(n) for n in lat.n), sigma, p, res, it)
        if res > last:
            if damp < 1.0:
                raise SolverError(f"iteration diverges (residual {res:.3e}); coupling outside contraction regime")
            damp = 0.5
        last = res
        sigma = sigma + damp * (new - sigma)
    raise SolverError(f"no convergence in {max_iter} iterations (residual {last:.3e})")


def delta_m(p: ModelParams, sigma: SelfEnergyTable) -> float:
    """Total mass counterterm, five equal colour contributions."""
    return N_COLOURS * delta_m_colour(p, sigma)


def delta_m_colour(p: ModelParams, sigma: SelfEnergyTable) -> float:
    c = p.cutoffs
    lat = _lattice(c)
    w = c.kappa(lat.k, c.j_max)
    T = _tadpole(p, lat, np.asarray(sigma.array), w)
    return p.coupling * float(T[lat.N])


def bare_mass_sq(p: ModelParams, sigma: SelfEnergyTable) -> float:
    return (p.m_r_sq - delta_m(p, sigma)) / p.Z_b


@dataclass(frozen=True)
class EffectiveConstants:
    j: tuple
    Z: tuple
    gZ2: tuple
    g: tuple

    def at(self, j: int):
        i = self.j.index(j)
        return self.Z[i], self.gZ2[i], self.g[i]

    def rows(self):
        return list(zip(self.j, self.Z, self.gZ2, self.g))


def sigma_above(p: ModelParams, sigma: SelfEnergyTable, j: int) -> np.ndarray:
    """sigma^{>=j}(n): internal momenta restricted to slices j..j_max, full
    sigma_mr in the propagators."""
    c = p.cutoffs
    lat = _lattice(c)
    if j > c.j_max:
        return np.zeros(len(lat.n))
    w = c.eta_geq(lat.k, j)
    s = np.asarray(sigma.array)
    T = _tadpole(p, lat, s, w)
    return -p.coupling * (T - T[lat.N])


def effective_constants(p: ModelParams, sigma: SelfEnergyTable) -> EffectiveConstants:
    """Z_j = Z_b - [sigma^{>=j+1}(1) - sigma^{>=j+1}(0)] (forward difference in n^2)
    and g_j Z_j^2 = g_b Z_b^2 / (1 + g_b Z_b^2 sum_r G^{>=j+1}(0, r)^2)."""
    c = p.cutoffs
    lat = _lattice(c)
    N = lat.N
    js, Zs, gZ2s, gs = [], [], [], []
    for j in range(-1, c.j_max + 1):
        if j == c.j_max:
            Zj, gz = p.Z_b, p.coupling
            gj = p.g_b
        else:
            s_up = sigma_above(p, sigma, j + 1)
            Zj = p.Z_b - (s_up[N + 1] - s_up[N])
            w = c.eta_geq(lat.k, j + 1)
            G = _propagator_row(p, lat, s_up, w)
            gz = p.coupling / (1.0 + p.coupling * float(np.sum(G * G)))
            gj = gz / (Zj * Zj)
        js.append(j)
        Zs.append(float(Zj))
        gZ2s.append(float(gz))
        gs.append(float(gj))
    return EffectiveConstants(tuple(js), tuple(Zs), tuple(gZ2s), tuple(gs))


def _propagator_row(p, lat, s, w):
    # G(0, r) with r in Z^4: the zero component contributes s(0)
    N = lat.N
    wq = lat.profile(w, 0)
    S = s[lat.idx[0]] + s[lat.idx[1]] + s[lat.idx[2]] + s[lat.idx[3]] + s[N]
    den = p.Z_b * lat.q2 + p.m_r_sq - S
    live = wq != 0
    if np.any(den[live] <= 0):
        raise SolverError("non-positive propagator denominator in the effective coupling")
    return wq[live] / den[live]


@dataclass(frozen=True)
class Renormalized:
    params: ModelParams
    sigma: SelfEnergyTable
    constants: EffectiveConstants
    delta_m: float


def renormalize(g_b: float, m_r_sq: float = 1.0, cutoffs: CutoffFamily | None = None,
                tol: float = 1e-12, max_iter: int = 60) -> Renormalized:
    """Fix Z_b by the condition Z_{-1} = 1 (secant iteration), then solve."""
    cutoffs = cutoffs or CutoffFamily()

    def run(Zb):
        p = ModelParams(g_b, m_r_sq, Zb, cutoffs)
        s = solve_sigma_mr(p, tol)
        return p, s, effective_constants(p, s)

    def miss(Zb):
        out = run(Zb)
        return out[2].Z[0] - 1.0, out

    z0, z1 = 1.0, 1.0 + 1e-3
    f0, _ = miss(z0)
    f1, out = miss(z1)
    for _ in range(max_iter):
        if abs(f1) <= 1e-13:
            break
        if f1 == f0:
            raise SolverError("secant step for Z_b stalled")
        z0, z1 = z1, z1 - f1 * (z1 - z0) / (f1 - f0)
        f0 = f1
        f1, out = miss(z1)
    else:
        raise SolverError("Z_b did not converge")
    p, s, k = out
    return Renormalized(p, s, k, delta_m(p, s))
