from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from melonrg.normal_forms import (
    field_series,
    lie_apply,
    pushforward_residual,
    szekeres_normal_form,
    time_one_map,
    vector_field_log,
)
from melonrg.series import PowerSeries


def sympy_log_coefficients(K):
    """X_2..X_K in terms of h_2..h_K by undetermined coefficients in sympy."""
    z = sympy.Symbol("z")
    hs = sympy.symbols(f"h2:{K + 1}")
    xs = sympy.symbols(f"x2:{K + 1}")
    X = sum(x * z ** (k + 2) for k, x in enumerate(xs))
    term, total = z, z
    for n in range(1, K):
        term = sympy.expand(X * sympy.diff(term, z) / n)
        term = sum(term.coeff(z, k) * z ** k for k in range(K + 1))
        total += term
    eqs = [sympy.Eq(sympy.expand(total).coeff(z, k), hs[k - 2]) for k in range(2, K + 1)]
    sol = sympy.solve(eqs, xs, dict=True)[0]
    return hs, [sol[x] for x in xs]


def test_third_coefficient_symbolic():
    hs, X = sympy_log_coefficients(4)
    b2, b3 = hs[0], hs[1]
    assert sympy.simplify(X[0] - b2) == 0
    assert sympy.simplify(X[1] - (b3 - b2 ** 2)) == 0


def test_vector_field_log_matches_symbolic():
    hs, X = sympy_log_coefficients(6)
    h = [0, 1, Fraction(-3, 2), Fraction(2, 7), 5, Fraction(-1, 3), 2]
    sub = {s: sympy.Rational(c.numerator, c.denominator) if isinstance(c, Fraction) else c
           for s, c in zip(hs, h[2:])}
    got = vector_field_log(h, 6)
    for k, expr in enumerate(X):
        v = sympy.Rational(expr.subs(sub))
        assert got[k + 2] == Fraction(int(v.p), int(v.q))


def test_quadratic_cubic_example():
    X = vector_field_log([0, 1, 2, 3], 6)
    assert X[2] == 2
    assert X[3] == 3 - 2 ** 2
    assert X.coeffs[:5] == [0, 0, 2, -1, -3]


def test_identity_has_zero_log():
    assert vector_field_log([0, 1], 8).is_zero()


def test_log_rejects_non_tangent():
    with pytest.raises(ValueError):
        vector_field_log([0, 2, 1], 5)
    with pytest.raises(ValueError):
        vector_field_log([0, 1, 1], 1)
    with pytest.raises(ValueError):
        time_one_map(PowerSeries([0, 1, 1], 4))


@settings(max_examples=25, deadline=None)
@given(st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=5), min_size=9, max_size=9))
def test_log_round_trip(tail):
    h = [0, 1] + tail
    X = vector_field_log(h, 10)
    back = time_one_map(X)
    assert back.coeffs == [Fraction(c) for c in h]


def test_time_one_map_numerically():
    # the polynomial field X, flowed for unit time, reproduces h up to O(z^11)
    h = [0, 1, -1, 0.5, 0.25]
    X = [float(c) for c in vector_field_log(h, 10).coeffs]

    def rhs(_t, y):
        return [np.polyval(X[::-1], y[0])]

    for z0 in (0.01, -0.02, 0.015j + 0.005):
        sol = solve_ivp(rhs, (0, 1), [complex(z0)], method="DOP853", rtol=1e-13, atol=1e-18)
        hz = np.polyval(h[::-1], z0)
        assert abs(sol.y[0, -1] - hz) < 1e-15


def test_lie_apply():
    X = PowerSeries([0, 0, 1], 5)
    f = PowerSeries([0, 1], 5)
    assert lie_apply(X, f) == X
    assert lie_apply(X, X).coeffs[:4] == [0, 0, 0, 2]


# -- Szekeres ----------------------------------------------------------------

def test_szekeres_pure_quadratic_field():
    nf = szekeres_normal_form(-1, 0, (), 8)
    assert nf.target_coeffs == (-1, 0)
    assert nf.u[0] == 1                    # u(0) = -beta2
    assert nf.v[0] == 1 / nf.u[0]          # v(0) = 1/(p u(0)^p), p = 1
    assert nf.residue == 0
    assert pushforward_residual(nf, -1, 0).is_zero()


def test_szekeres_residue_and_derivative():
    nf = szekeres_normal_form(Fraction(-3, 2), Fraction(5, 4), (1, -2), 10)
    assert nf.residue == -Fraction(5, 4) / Fraction(9, 4)
    assert nf.change_of_variable[1] == Fraction(3, 2)   # phi'(0) = -beta2
    assert nf.target_coeffs[1] == Fraction(5, 4) / Fraction(9, 4)
    assert nf.pole_order == 2


@settings(max_examples=25, deadline=None)
@given(b2=st.fractions(min_value=-4, max_value=-Fraction(1, 4), max_denominator=4),
       b3=st.fractions(min_value=-3, max_value=3, max_denominator=4),
       higher=st.lists(st.fractions(min_value=-2, max_value=2, max_denominator=3), max_size=4))
def test_szekeres_residual_vanishes(b2, b3, higher):
    nf = szekeres_normal_form(b2, b3, higher, 10)
    r = pushforward_residual(nf, b2, b3, higher)
    assert r.order == 12
    assert r.is_zero()


def test_szekeres_conjugates_numerically():
    # phi maps trajectories of the original field onto those of the normal form
    b2, b3, c4 = -1.0, 0.8, 0.3
    nf = szekeres_normal_form(-1, Fraction(4, 5), (Fraction(3, 10),), 10)
    phi = [float(c) for c in nf.change_of_variable.coeffs]
    ts = np.linspace(0, 50, 101)
    z = solve_ivp(lambda _t, y: y * y * (b2 + b3 * y + c4 * y * y), (0, 50), [0.01],
                  t_eval=ts, method="DOP853", rtol=1e-13, atol=1e-20).y[0]
    y0 = np.polyval(phi[::-1], 0.01)
    y = solve_ivp(lambda _t, y: -y * y + b3 / b2 ** 2 * y ** 3, (0, 50), [y0],
                  t_eval=ts, method="DOP853", rtol=1e-13, atol=1e-20).y[0]
    assert np.max(np.abs(np.polyval(phi[::-1], z) - y)) < 1e-12


def test_szekeres_errors():
    with pytest.raises(ValueError):
        szekeres_normal_form(0, 1)
    with pytest.raises(ValueError):
        szekeres_normal_form(-1, 1, (), 1)
