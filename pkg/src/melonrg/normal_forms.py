"""Formal normal forms for maps and vector fields tangent to the identity."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .series import PowerSeries


def _as_series(coeffs, order):
    if isinstance(coeffs, PowerSeries):
        return coeffs.truncate(order) if coeffs.order >= order else PowerSeries(coeffs.coeffs, order)
    return PowerSeries(list(coeffs), order)


def lie_apply(X: PowerSeries, f: PowerSeries) -> PowerSeries:
    """(X d/dz) f."""
    n = min(X.order, f.order)
    return (X.truncate(n) * PowerSeries(f.derivative().coeffs, n)).truncate(n)


def time_one_map(X: PowerSeries) -> PowerSeries:
    """exp(X)(z) = sum_n L_X^n(z) / n! for X = O(z^2)."""
    if X[0] != 0 or X[1] != 0:
        raise ValueError("vector field must vanish to second order")
    K = X.order
    term = PowerSeries.x(K)
    out = term
    n = 1
    while True:
        term = lie_apply(X, term) * Fraction(1, n)
        if term.is_zero():
            return out
        out = out + term
        n += 1


def vector_field_log(h_coeffs, K: int) -> PowerSeries:
    """Coefficients of X = sum_{k>=2} X_k z^k with exp(X) = h up to z^K."""
    if K < 2:
        raise ValueError("K must be >= 2")
    h = _as_series(h_coeffs, K)
    if h[0] != 0 or h[1] != 1:
        raise ValueError("h must be tangent to the identity")
    X = PowerSeries([0] * (K + 1), K)
    for k in range(2, K + 1):
        cur = time_one_map(X)
        X.coeffs[k] = h[k] - cur[k]
    return X


@dataclass(frozen=True)
class NormalForm:
    change_of_variable: PowerSeries
    u: PowerSeries
    v: PowerSeries
    target_coeffs: tuple
    residue: Fraction
    pole_order: int = 2


def field_series(beta2, beta3, higher=(), order=12) -> PowerSeries:
    cs = [0, 0, beta2, beta3] + list(higher)
    return PowerSeries(cs, order)


def szekeres_normal_form(beta2, beta3, higher=(), K: int = 10) -> NormalForm:
    """Change of variable y = z u(z) turning z' = f(z) into y' = -y^2 + (b3/b2^2) y^3.

    Uses the integrated form 1/u + a z log(u/u0) - a z log(1 + a z u) = v(z)
    with a = -b3/b2^2, u0 = u(0) = -b2 and v from the Laurent expansion of
    1/f; the choice of integration constant keeps everything rational.
    """
    b2, b3 = Fraction(beta2), Fraction(beta3)
    if b2 == 0:
        raise ValueError("beta2 must be non-zero")
    if K < 2:
        raise ValueError("K must be >= 2")
    n = K + 2
    f = field_series(b2, b3, [Fraction(c) for c in higher], n + 2)
    # 1/f = z^-2 / (b2 + b3 z + ...) ; c_k are the Laurent coefficients from k=-2
    inv = f.shift(-2).reciprocal()
    c = inv.coeffs  # c[i] multiplies z^(i-2)
    a = -b3 / (b2 * b2)
    assert c[1] == a
    v = [Fraction(0)] * (K + 1)
    v[0] = -c[0]
    for k in range(0, K - 1):
        v[k + 2] = c[k + 2] / (k + 1)
    v = PowerSeries(v, K)
    u0 = 1 / v[0]
    z = PowerSeries.x(K)
    u = PowerSeries.const(u0, K)
    for _ in range(K + 1):
        den = v - a * z * (u / u0).log() + a * z * (1 + a * z * u).log()
        u = den.reciprocal()
    phi = u.shift(1)
    return NormalForm(phi, u, v, (Fraction(-1), b3 / (b2 * b2)), a, 2)


def pushforward_residual(nf: NormalForm, beta2, beta3, higher=()) -> PowerSeries:
    """phi'(z) f(z) - F(phi(z)) with F(y) = -y^2 + (b3/b2^2) y^3, valid to z^(K+2)."""
    phi = nf.change_of_variable
    n = phi.order + 1  # = K + 2
    f = field_series(beta2, beta3, [Fraction(c) for c in higher], n)
    dphi = PowerSeries(phi.derivative().coeffs, n)
    p = PowerSeries(phi.coeffs, n)
    lhs = dphi * f
    rhs = nf.target_coeffs[0] * p * p + nf.target_coeffs[1] * p * p * p
    return lhs - rhs
