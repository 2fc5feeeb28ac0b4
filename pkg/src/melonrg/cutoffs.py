"""Smooth multiscale cutoffs and the lattice sums entering the one-loop
beta coefficient.

The basic profile is kappa = 1_[-a, a] * chi_eps, the indicator smoothed by
a normalised bump chi_eps(x) ~ exp(-1 / (1 - (x/eps)^2)).  For u >= 0 only
the right edge matters:

    kappa(u) = 1 - Phi((u - a) / eps),

with Phi the cumulative distribution of the unit bump on [-1, 1].  Phi is
tabulated once on a uniform grid by composite Gauss-Legendre quadrature and
evaluated between nodes by a short Gauss-Legendre rule from the nearest
node, which keeps ~1e-16 accuracy everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)
_GRID = 4096


def _bump(s):
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1.0
    si = s[inside]
    out[inside] = np.exp(-1.0 / (1.0 - si * si))
    return out


def _gl(lo, hi):
    """Vectorised 16-point Gauss-Legendre integral of the bump over [lo, hi]."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    pts = mid[..., None] + half[..., None] * _GL_NODES
    return half * (_bump(pts) @ _GL_WEIGHTS)


@lru_cache(maxsize=1)
def _cdf_table():
    nodes = np.linspace(-1.0, 1.0, _GRID + 1)
    cells = _gl(nodes[:-1], nodes[1:])
    cum = np.concatenate([[0.0], np.cumsum(cells)])
    return nodes, cum, cum[-1]


def bump_mass() -> float:
    """Integral of exp(-1/(1-s^2)) over [-1, 1]."""
    return float(_cdf_table()[2])


def bump_cdf(s):
    """Phi(s): cumulative mass of the normalised unit bump."""
    nodes, cum, total = _cdf_table()
    s = np.asarray(s, dtype=float)
    sc = np.clip(s, -1.0, 1.0)
    k = np.clip(np.floor((sc + 1.0) * (_GRID / 2.0)).astype(np.int64), 0, _GRID - 1)
    val = (cum[k] + _gl(nodes[k], sc)) / total
    val = np.where(s <= -1.0, 0.0, np.where(s >= 1.0, 1.0, val))
    return val


def bump_density(s):
    return _bump(s) / _cdf_table()[2]


@dataclass(frozen=True)
class CutoffFamily:
    """Slice ratio M, UV index j_max and the smoothing parameters (a, eps)."""

    M: int = 2
    j_max: int = 2
    a: float = 2.5
    eps: float = 1.5

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 2 or self.M * self.M <= 2:
            raise ValueError("M must be an integer with M^2 > 2")
        if int(self.j_max) != self.j_max or self.j_max < 0:
            raise ValueError("j_max must be a non-negative integer")
        if not 0 < self.eps < self.a:
            raise ValueError("need 0 < eps < a")
        if self.a + self.eps > self.M ** 2 * (self.a - self.eps):
            raise ValueError("slices i and i+2 would overlap: need a+eps <= M^2 (a-eps)")

    # -- support data -----------------------------------------------------
    @property
    def plateau(self) -> float:
        return self.a - self.eps

    @property
    def support(self) -> float:
        return self.a + self.eps

    @property
    def N(self) -> int:
        """Largest |n| with kappa_{j_max}(n^2) possibly non-zero."""
        return math.isqrt(int(math.floor(self.support * self.M ** (2 * self.j_max))))

    def scale(self, j: int) -> float:
        return float(self.M) ** (2 * j)

    # -- profiles ----------------------------------------------------------
    def kappa0(self, u):
        u = np.asarray(u, dtype=float)
        return bump_cdf((u + self.a) / self.eps) - bump_cdf((u - self.a) / self.eps)

    def dkappa0(self, u):
        u = np.asarray(u, dtype=float)
        return (bump_density((u + self.a) / self.eps) - bump_density((u - self.a) / self.eps)) / self.eps

    def kappa(self, u, j: int):
        """kappa_j(u) = kappa(M^{-2j} u); j = -1 gives the zero function."""
        u = np.asarray(u, dtype=float)
        if j < 0:
            return np.zeros_like(u)
        return self.kappa0(u / self.scale(j))

    def dkappa(self, u, j: int):
        u = np.asarray(u, dtype=float)
        if j < 0:
            return np.zeros_like(u)
        return self.dkappa0(u / self.scale(j)) / self.scale(j)

    def _check_slice(self, j):
        if not 0 <= j <= self.j_max:
            raise ValueError(f"slice index {j} outside 0..{self.j_max}")

    def eta(self, u, j: int):
        self._check_slice(j)
        return self.kappa(u, j) - self.kappa(u, j - 1)

    def deta(self, u, j: int):
        self._check_slice(j)
        return self.dkappa(u, j) - self.dkappa(u, j - 1)

    def eta_free(self, u, j: int):
        """Slice profile h(M^{-2j} u) without the j <= j_max restriction."""
        u = np.asarray(u, dtype=float)
        return self.kappa(u, j) - self.kappa(u, j - 1) if j >= 0 else np.zeros_like(u)

    def deta_free(self, u, j: int):
        u = np.asarray(u, dtype=float)
        return self.dkappa(u, j) - self.dkappa(u, j - 1) if j >= 0 else np.zeros_like(u)

    def eta_geq(self, u, j: int):
        """Sum of slices j..j_max, i.e. kappa_{j_max} - kappa_{j-1}."""
        if j > self.j_max:
            return np.zeros_like(np.asarray(u, dtype=float))
        return self.kappa(u, self.j_max) - self.kappa(u, j - 1)

    def h(self, u):
        u = np.asarray(u, dtype=float)
        return self.kappa0(u) - self.kappa0(self.M ** 2 * u)

    def with_j_max(self, j_max):
        return CutoffFamily(self.M, j_max, self.a, self.eps)


def kappa(c: CutoffFamily, u, j: int):
    if np.any(np.asarray(u) < 0):
        raise ValueError("kappa is defined for u >= 0")
    return c.kappa(u, j)


def eta(c: CutoffFamily, u, j: int):
    if np.any(np.asarray(u) < 0):
        raise ValueError("eta is defined for u >= 0")
    return c.eta(u, j)


# ---------------------------------------------------------------------------
# sums over Z^4 through the four-square representation numbers
# ---------------------------------------------------------------------------

@lru_cache(maxsize=4)
def r4_table(kmax: int) -> np.ndarray:
    """r4(k) = #{p in Z^4 : p^2 = k} for 0 <= k <= kmax (Jacobi: 8 * sum of d | k, 4 not | d)."""
    s = np.zeros(kmax + 1, dtype=np.int64)
    root = math.isqrt(kmax)
    # pairs (d, m) with d*m <= kmax: small d directly, small m with large d
    for d in range(1, root + 1):
        if d % 4:
            s[d::d] += d
    for m in range(1, kmax // (root + 1) + 1):
        d = np.arange(root + 1, kmax // m + 1, dtype=np.int64)
        s[m * d] += np.where(d % 4 != 0, d, 0)
    out = 8 * s
    out[0] = 1
    out.flags.writeable = False
    return out


def r4_bruteforce(kmax: int) -> np.ndarray:
    """Same table by convolving the square indicator four times (exact ints)."""
    r1 = np.zeros(kmax + 1, dtype=np.int64)
    n = 0
    while n * n <= kmax:
        r1[n * n] += 1 if n == 0 else 2
        n += 1
    out = r1
    for _ in range(3):
        out = np.convolve(out, r1)[: kmax + 1]
    return out


def z4_sum(func, kmin: int, kmax: int) -> float:
    """Sum of func(p^2) over p in Z^4 with kmin <= p^2 <= kmax."""
    k = np.arange(kmin, kmax + 1, dtype=np.int64)
    r = r4_table(int(kmax))[kmin:]
    vals = func(k.astype(float))
    return float(np.dot(r.astype(float), vals))


@dataclass(frozen=True)
class BetaCoefficients:
    j: int
    K_j: float
    A_diff: float
    A_tilde_diff: float
    beta_j: float


def _slice_window(c: CutoffFamily, j: int):
    """Integer range of p^2 where slice j can be non-zero."""
    lo = 0 if j == 0 else int(math.floor(c.plateau * c.scale(j - 1)))
    hi = int(math.ceil(c.support * c.scale(j)))
    return lo, hi


def beta_coefficients(c: CutoffFamily, m_r_sq: float, j: int, check_range: bool = True) -> BetaCoefficients:
    """Slice sums over Z^4 at scale j and the resulting one-loop coefficient.

    K_j   = sum eta'_{j+1}(p^2) / (p^2 + m^2)
    Ã     = sum eta_{j+1}(p^2) / (p^2 + m^2)^2
    A     = sum (eta_{j+1}^2 + 2 eta_{j+1} eta_{j+2})(p^2) / (p^2 + m^2)^2
    beta_j = A - 2 Ã + 2 K_j
    """
    if check_range and not 0 <= j < c.j_max - 1:
        raise ValueError(f"need 0 <= j < j_max - 1 = {c.j_max - 1}, got j={j}")
    if j < 0:
        raise ValueError("j must be non-negative")
    if m_r_sq <= 0:
        raise ValueError("m_r_sq must be positive")
    lo, hi = _slice_window(c, j + 1)

    def K(u):
        return c.deta_free(u, j + 1) / (u + m_r_sq)

    def At(u):
        return c.eta_free(u, j + 1) / (u + m_r_sq) ** 2

    def A(u):
        e1 = c.eta_free(u, j + 1)
        return (e1 * e1 + 2.0 * e1 * c.eta_free(u, j + 2)) / (u + m_r_sq) ** 2

    Kj = z4_sum(K, lo, hi)
    At_ = z4_sum(At, lo, hi)
    A_ = z4_sum(A, lo, hi)
    return BetaCoefficients(j, Kj, A_, At_, A_ - 2.0 * At_ + 2.0 * Kj)


def beta2_integrand(c: CutoffFamily, u):
    """F(u) with beta_2 = -pi^2 * int_0^inf F(u) / u du."""
    M2 = c.M ** 2
    return c.h(u) * (2.0 * (1.0 - c.kappa0(u / M2)) + c.kappa0(u) + c.kappa0(M2 * u))


def beta2_integral(c: CutoffFamily, rel_tol: float = 1e-10) -> float:
    """-∫_{R^4} d^4p/p^4 h(p^2)[2(1-kappa(p^2/M^2)) + kappa(p^2) + kappa(M^2 p^2)].

    Radial reduction: ∫_{R^4} F(p^2)/p^4 d^4p = pi^2 ∫_0^∞ F(u)/u du.
    """
    M2 = c.M ** 2
    lo, hi = c.plateau / M2, c.support
    breaks = sorted({x for x in (c.plateau, c.support / M2, c.plateau * M2 / M2, c.support)
                     if lo < x < hi})

    def f(u):
        return float(beta2_integrand(c, u)) / u

    val, err = integrate.quad(f, lo, hi, points=breaks or None, epsabs=0.0,
                              epsrel=rel_tol * 1e-2, limit=500)
    if not np.isfinite(val) or err > rel_tol * abs(val):
        raise ArithmeticError(f"beta_2 quadrature did not converge (err={err:g})")
    return -math.pi ** 2 * val


def beta2_lattice_oracle(c: CutoffFamily, spacing: float, chunk: int = 8) -> float:
    """Direct 4D Riemann sum of the beta_2 integrand on (spacing * Z)^4."""
    rmax = math.sqrt(c.support)
    n = int(math.ceil(rmax / spacing))
    axis = spacing * np.arange(-n, n + 1)
    sq = axis * axis
    total = 0.0
    cell = spacing ** 4
    b = sq[None, None, :] + sq[None, :, None]
    for i0 in range(0, len(axis), chunk):
        a = sq[i0:i0 + chunk, None, None, None] + sq[None, :, None, None]
        u = a + b[None, ...]
        mask = (u > 0) & (u <= c.support)
        uu = u[mask]
        total += float(np.sum(beta2_integrand(c, uu) / (uu * uu)))
    return -total * cell


def beta_lattice_oracle(c: CutoffFamily, m_r_sq: float, j: int) -> BetaCoefficients:
    """Same slice sums by explicit enumeration of p in Z^4 (small j only)."""
    lo, hi = _slice_window(c, j + 1)
    n = math.isqrt(hi)
    axis = np.arange(-n, n + 1, dtype=np.int64)
    sq = axis * axis
    b = (sq[None, :] + sq[:, None]).ravel()
    Kj = At = A = 0.0
    for x in sq:
        for y in sq:
            u = (x + y + b).astype(float)
            u = u[(u >= lo) & (u <= hi)]
            e1 = c.eta_free(u, j + 1)
            e2 = c.eta_free(u, j + 2)
            den = u + m_r_sq
            Kj += float(np.sum(c.deta_free(u, j + 1) / den))
            At += float(np.sum(e1 / den ** 2))
            A += float(np.sum((e1 * e1 + 2 * e1 * e2) / den ** 2))
    return BetaCoefficients(j, Kj, A, At, A - 2 * At + 2 * Kj)
