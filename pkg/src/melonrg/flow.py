"""Complex RG flows g' = beta2 g^2 + beta3 g^3 + g^4 h(g) and the domains on
which they stay bounded."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp


class FlowError(RuntimeError):
    pass


class EscapeError(FlowError):
    pass


@dataclass(frozen=True)
class FlowProblem:
    beta2: float
    beta3: float = 0.0
    higher: tuple = ()
    g_r: complex = 0.0

    def __post_init__(self):
        if not self.beta2 < 0:
            raise ValueError("beta2 must be strictly negative")
        object.__setattr__(self, "higher", tuple(float(c) for c in self.higher))

    @property
    def beta32(self) -> float:
        return self.beta3 / self.beta2

    def with_g(self, g_r):
        return FlowProblem(self.beta2, self.beta3, self.higher, g_r)

    def h(self, z):
        out = 0.0
        for c in reversed(self.higher):
            out = out * z + c
        return out

    def field(self, z):
        return z * z * (self.beta2 + z * (self.beta3 + z * self.h(z)))


def quadratic_exact(beta2: float, g_r: complex, t):
    """Closed form 1/g = 1/g_r - beta2 t."""
    den = 1.0 - beta2 * g_r * np.asarray(t)
    if np.any(den == 0):
        raise FlowError("quadratic flow hits its pole")
    out = g_r / den
    return complex(out) if np.ndim(out) == 0 else out


@dataclass
class Trajectory:
    t: np.ndarray
    g: np.ndarray
    escaped: bool = False
    meta: dict = field(default_factory=dict)

    @property
    def samples(self):
        return list(zip(self.t.tolist(), self.g.tolist()))


def integrate(fp: FlowProblem, T: float, tol: float = 1e-10, t_eval=None,
              escape_radius: float | None = None, method: str = "RK45") -> Trajectory:
    """Adaptive Runge-Kutta integration in the complex plane.

    Stops early (``escaped=True``) once |g| reaches ``escape_radius``
    (default 10 |g_r|).
    """
    if not T > 0 or not tol > 0:
        raise ValueError("need T > 0 and tol > 0")
    g0 = complex(fp.g_r)
    if t_eval is None:
        t_eval = np.linspace(0.0, T, 201)
    t_eval = np.asarray(t_eval, dtype=float)
    if g0 == 0:
        return Trajectory(t_eval, np.zeros(len(t_eval), dtype=complex), False, {"nfev": 0})
    R = escape_radius if escape_radius is not None else 10.0 * abs(g0)

    def rhs(_t, y):
        return fp.field(y)

    def escape(_t, y):
        return abs(y[0]) - R

    escape.terminal = True
    escape.direction = 1
    sol = solve_ivp(rhs, (0.0, T), np.array([g0]), method=method, t_eval=t_eval,
                    rtol=tol, atol=tol * min(abs(g0), 1.0), events=escape)
    if sol.status == -1:
        raise FlowError(f"integration failed: {sol.message}")
    escaped = sol.status == 1
    meta = {"nfev": int(sol.nfev), "status": int(sol.status), "method": method}
    return Trajectory(sol.t, sol.y[0], escaped, meta)


# ---------------------------------------------------------------------------
# domains
# ---------------------------------------------------------------------------

DOMAIN_KINDS = ("omega", "cardioid", "heps", "disk", "nsdisk")


@dataclass(frozen=True)
class DomainSpec:
    kind: str
    eps: float
    beta32: float = 0.0

    def __post_init__(self):
        k = self.kind.lower()
        if k not in DOMAIN_KINDS:
            raise ValueError(f"unknown domain kind {self.kind!r}")
        object.__setattr__(self, "kind", k)
        if not self.eps > 0:
            raise ValueError("eps (or radius) must be positive")


def _omega(eps, rho, th):
    if abs(th) <= math.pi / 2:
        return rho <= eps
    return rho <= eps * abs(math.sin(th))


def _heps(eps, b, rho, th):
    if abs(th) <= math.pi / 2:
        return rho <= eps / (1.0 + 3.0 * math.pi * abs(b) * eps)
    s = abs(math.sin(th))
    if s == 0.0:
        return rho == 0.0
    return rho <= eps * s / (1.0 + eps * abs(b) * (abs(math.log(s)) + 3.0 * math.pi))


def domain_contains(d: DomainSpec, z: complex) -> bool:
    z = complex(z)
    rho, th = abs(z), cmath.phase(z)
    if d.kind == "omega":
        return _omega(d.eps, rho, th)
    if d.kind == "cardioid":
        return rho <= d.eps * math.cos(th / 2) ** 2
    if d.kind == "heps":
        return _heps(d.eps, d.beta32, rho, th)
    if d.kind == "disk":
        return rho < d.eps
    # Nevanlinna-Sokal disk of radius eps centred at eps
    return rho < 2.0 * d.eps * math.cos(th) if rho > 0 else False


def domain_radius(d: DomainSpec, theta: float) -> float:
    """Boundary radius of a star-shaped domain in direction theta."""
    th = math.remainder(theta, 2 * math.pi)
    if d.kind == "omega":
        return d.eps if abs(th) <= math.pi / 2 else d.eps * abs(math.sin(th))
    if d.kind == "cardioid":
        return d.eps * math.cos(th / 2) ** 2
    if d.kind == "heps":
        if abs(th) <= math.pi / 2:
            return d.eps / (1.0 + 3.0 * math.pi * abs(d.beta32) * d.eps)
        s = abs(math.sin(th))
        if s == 0:
            return 0.0
        return d.eps * s / (1.0 + d.eps * abs(d.beta32) * (abs(math.log(s)) + 3.0 * math.pi))
    if d.kind == "disk":
        return d.eps
    return max(2.0 * d.eps * math.cos(th), 0.0)


def sample_domain(d: DomainSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    """n points of a star-shaped domain (uniform angle, area-uniform radius)."""
    half = math.pi / 2 if d.kind == "nsdisk" else math.pi  # NS disks live in Re z > 0
    th = rng.uniform(-half, half, n)
    r = np.array([domain_radius(d, t) for t in th]) * np.sqrt(rng.uniform(0, 1, n))
    return r * np.exp(1j * th)


def admissible_eps(eps: float, beta32: float) -> bool:
    """The smallness conditions used to bound the cubic correction phi."""
    b = abs(beta32) * eps
    if b >= 1:
        return False
    return ((2 * math.pi + 1) * b <= 1 / 3 and math.pi * b <= 1 / 3
            and b / math.e <= 1 / 3 and -math.log1p(-b) <= 0.5)


def max_admissible_eps(beta32: float) -> float:
    if beta32 == 0:
        return math.inf
    b = abs(beta32)
    return min(1 / (3 * (2 * math.pi + 1) * b), 1 / (3 * math.pi * b), math.e / (3 * b),
               (1 - math.exp(-0.5)) / b)


# ---------------------------------------------------------------------------
# cubic flow: g = g_r / (u3 + beta phi)
# ---------------------------------------------------------------------------

def _phi_step(phi, alpha, beta, t, newton_tol, max_newton):
    c = 1.0 + alpha * t
    u3 = c + beta * np.log(c)
    A = (u3 + beta) / (1.0 + beta)
    B = beta / (1.0 + beta)
    x = phi.copy()
    for _ in range(max_newton):
        ex = np.exp(x)
        f = (A + B * x) / c - ex
        df = B / c - ex
        dx = f / df
        x = x - dx
        if np.all(np.abs(dx) <= newton_tol * (1.0 + np.abs(x))):
            break
    else:
        return None
    return x


def phi_residual(alpha, beta, t, phi):
    """|((u3 + beta phi + beta)/((1+beta)(1+alpha t))) e^{-phi} - 1| (branch free)."""
    c = 1.0 + alpha * t
    u3 = c + beta * np.log(c)
    return np.abs((u3 + beta * phi + beta) / ((1.0 + beta) * c) * np.exp(-phi) - 1.0)


def cubic_phi(fp: FlowProblem, t, g_r=None, max_jump: float = 0.5,
              newton_tol: float = 1e-15, max_newton: int = 60):
    """phi(t) on an increasing grid of times, by Newton continuation from phi(0) = 0.

    ``g_r`` may be an array of initial data (default fp.g_r); the result has
    shape (len(g_r), len(t)) in that case.
    """
    if fp.higher and any(fp.higher):
        raise ValueError("cubic_phi needs a purely cubic field")
    scalar_t = np.ndim(t) == 0
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(ts < 0) or np.any(np.diff(ts) < 0):
        raise ValueError("times must be non-negative and increasing")
    gr = np.atleast_1d(np.asarray(fp.g_r if g_r is None else g_r, dtype=complex))
    scalar_g = np.ndim(fp.g_r if g_r is None else g_r) == 0
    alpha = -fp.beta2 * gr
    beta = fp.beta32 * gr
    out = np.zeros((len(gr), len(ts)), dtype=complex)
    phi = np.zeros(len(gr), dtype=complex)
    t_now = 0.0
    for k, target in enumerate(ts):
        dt = target - t_now
        while t_now < target:
            t_try = min(target, t_now + dt)
            new = _phi_step(phi, alpha, beta, t_try, newton_tol, max_newton)
            if new is None or np.any(np.abs(new - phi) > max_jump):
                dt /= 2
                if dt < 1e-12 * max(1.0, target):
                    if new is not None and np.any(np.abs(new - phi) >= math.pi):
                        raise FlowError("branch jump in phi continuation")
                    raise FlowError("Newton continuation for phi did not converge")
                continue
            phi, t_now = new, t_try
            dt *= 2
        out[:, k] = phi
    if scalar_g:
        out = out[0]
        return complex(out[0]) if scalar_t else out
    return out[:, 0] if scalar_t else out


def cubic_denominator(fp: FlowProblem, t, phi, g_r=None):
    gr = np.asarray(fp.g_r if g_r is None else g_r, dtype=complex)
    t = np.asarray(t, dtype=float)
    if gr.ndim:
        gr = gr[:, None]
    c = 1.0 - fp.beta2 * gr * t
    return c + fp.beta32 * gr * np.log(c) + fp.beta32 * gr * phi


def cubic_solution(fp: FlowProblem, t, g_r=None):
    """g(t) = g_r / (1 - b2 g_r t + (b3/b2) g_r log(1 - b2 g_r t) + (b3/b2) g_r phi(t))."""
    gr = fp.g_r if g_r is None else g_r
    if np.all(np.asarray(gr) == 0):
        return np.zeros(np.broadcast(np.asarray(gr), np.asarray(t)).shape, dtype=complex) if np.ndim(t) or np.ndim(gr) else 0j
    phi = cubic_phi(fp, t, g_r)
    den = cubic_denominator(fp, t, phi, g_r)
    g = np.asarray(gr, dtype=complex)
    if g.ndim:
        g = g[:, None] if np.ndim(t) else g
    out = g / den
    return complex(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# real initial data: comparison with two cubic flows
# ---------------------------------------------------------------------------

def critical_coupling(fp: FlowProblem, search_max: float = 1.0, n_grid: int = 20001) -> float:
    """First positive zero of a(x) = 1 + b32 x + x^2 h(x)/b2 on (0, search_max], else search_max."""
    from scipy.optimize import brentq

    def a(x):
        return 1.0 + fp.beta32 * x + x * x * fp.h(x) / fp.beta2

    xs = np.linspace(0.0, search_max, n_grid)[1:]
    vals = np.array([a(x) for x in xs])
    bad = np.nonzero(vals <= 0)[0]
    if not len(bad):
        return search_max
    i = bad[0]
    if i == 0:
        return brentq(a, 0.0, xs[0]) if a(0.0) > 0 else 0.0
    return brentq(a, xs[i - 1], xs[i])


def sandwich_window(fp: FlowProblem, eps: float, search_max: float = 1.0, n_grid: int = 20001) -> float:
    """alpha * g_c: the largest x0 <= g_c with |x h(x)| < eps |beta3| on (0, x0).

    For beta3 > 0 the window is also capped at |beta2| / ((1 + eps) beta3),
    the fixed point of the upper comparison flow; beyond it that flow grows
    and its closed form (1 + beta32 g_r > 0) no longer exists.
    """
    if fp.beta3 == 0:
        raise ValueError("comparison flows coincide when beta3 = 0")
    gc = critical_coupling(fp, search_max, n_grid)
    if fp.beta3 > 0:
        gc = min(gc, -fp.beta2 / ((1.0 + eps) * fp.beta3))
    bound = eps * abs(fp.beta3)
    xs = np.linspace(0.0, gc, n_grid)[1:]
    vals = np.array([abs(x * fp.h(x)) for x in xs])
    over = np.nonzero(vals >= bound)[0]
    if not len(over):
        return gc
    i = over[0]
    if i == 0:
        return 0.0
    from scipy.optimize import brentq
    return brentq(lambda x: abs(x * fp.h(x)) - bound, xs[i - 1], xs[i])


def comparison_problems(fp: FlowProblem, eps: float):
    s = math.copysign(1.0, fp.beta3)
    lo = FlowProblem(fp.beta2, (1 - s * eps) * fp.beta3, (), fp.g_r)
    hi = FlowProblem(fp.beta2, (1 + s * eps) * fp.beta3, (), fp.g_r)
    return lo, hi


def sandwich_check(fp: FlowProblem, eps: float, t_grid, tol: float = 1e-12,
                   search_max: float = 1.0) -> bool:
    """True iff the full flow stays strictly between the two cubic comparison
    flows at every positive grid time (at t = 0 all three equal g_r)."""
    g_r = complex(fp.g_r)
    if g_r.imag != 0:
        raise ValueError("sandwich_check needs real initial data")
    x0 = g_r.real
    if x0 == 0:
        return True
    window = sandwich_window(fp, eps, search_max)
    if not 0 < x0 < window:
        raise ValueError(f"g_r = {x0} outside the comparison window (0, {window})")
    ts = np.asarray(sorted(t for t in t_grid if t > 0), dtype=float)
    if not len(ts):
        return True
    traj = integrate(fp, float(ts[-1]), tol, t_eval=ts, escape_radius=2 * x0 + 1, method="DOP853")
    if traj.escaped or len(traj.t) != len(ts):
        return False
    g = traj.g.real
    lo_fp, hi_fp = comparison_problems(fp, eps)
    lo = np.real(cubic_solution(lo_fp, ts))
    hi = np.real(cubic_solution(hi_fp, ts))
    return bool(np.all(lo < g) and np.all(g < hi))


# ---------------------------------------------------------------------------
# discrete dynamics
# ---------------------------------------------------------------------------

def discrete_iterate(h_coeffs, g_r: complex, n: int, radius: float = 1.0) -> list:
    """Orbit g_0 = g_r, g_{k+1} = h(g_k) of the polynomial with coefficients ``h_coeffs``."""
    coeffs = [complex(c) for c in getattr(h_coeffs, "coeffs", h_coeffs)]
    if len(coeffs) < 2 or coeffs[0] != 0 or coeffs[1] != 1:
        raise ValueError("h must be tangent to the identity")
    orbit = [complex(g_r)]
    z = complex(g_r)
    for _ in range(n):
        w = 0j
        for c in reversed(coeffs):
            w = w * z + c
        z = w
        if not abs(z) <= radius:
            raise EscapeError(f"orbit left the disk of radius {radius}")
        orbit.append(z)
    return orbit


def attracting_directions(a_top: complex, r: int):
    """(attracting, repelling) unit vectors v with a_top v^r real negative / positive."""
    if a_top == 0:
        raise ValueError("leading coefficient must be non-zero")
    if r < 1:
        raise ValueError("r must be >= 1")
    al = cmath.phase(a_top)
    att = [cmath.exp(1j * ((2 * k + 1) * math.pi - al) / r) for k in range(r)]
    rep = [cmath.exp(1j * (2 * k * math.pi - al) / r) for k in range(r)]
    return att, rep


def ns_disk_radius(eps: float, beta32: float) -> float:
    if not eps > 0:
        raise ValueError("eps must be positive")
    return eps / (6.0 * (1.0 + 1.5 * math.pi * abs(beta32) * eps))
