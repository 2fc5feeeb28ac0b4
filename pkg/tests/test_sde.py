import json

import numpy as np
import pytest

from melonrg.cutoffs import CutoffFamily, z4_sum
from melonrg.sde import (
    ModelParams,
    SolverError,
    bare_mass_sq,
    delta_m,
    delta_m_colour,
    effective_constants,
    renormalize,
    sigma_map,
    solve_sigma_mr,
)

from sde_oracle import nested_sigma


def params(g, j_max=1, Zb=1.0, m2=1.0, M=2):
    return ModelParams(g, m2, Zb, CutoffFamily(M, j_max))


def test_zero_coupling():
    p = params(0.0, 2)
    s = solve_sigma_mr(p)
    assert not np.any(s.array)
    assert delta_m(p, s) == 0.0
    k = effective_constants(p, s)
    assert all(z == 1.0 for z in k.Z)
    assert all(g == 0.0 for g in k.g)


@pytest.mark.parametrize("j_max, g", [(1, 0.01), (1, -0.05), (2, 0.01), (2, -0.03), (0, 0.02)])
def test_against_nested_oracle(j_max, g):
    p = params(g, j_max)
    s = solve_sigma_mr(p)
    n, sig, dm = nested_sigma(g, 1.0, 1.0, 2, j_max)
    assert tuple(n) == s.momenta
    assert s.residual <= 1e-12
    for c in range(5):
        assert np.max(np.abs(sig[c] - s.array)) <= 1e-10
        assert dm[c] == pytest.approx(delta_m_colour(p, s), abs=1e-10)


def test_oracle_with_field_strength():
    p = params(0.004, 1, Zb=1.3, m2=0.7)
    s = solve_sigma_mr(p)
    _, sig, _ = nested_sigma(0.004, 0.7, 1.3, 2, 1)
    assert np.max(np.abs(sig[0] - s.array)) <= 1e-10


def test_symmetries_exact():
    for g in (0.01, -0.04):
        s = solve_sigma_mr(params(g, 2))
        a = np.asarray(s.array)
        assert s[0] == 0.0
        assert np.array_equal(a, a[::-1])


def test_table_is_read_only_and_serialisable():
    s = solve_sigma_mr(params(0.01))
    with pytest.raises(ValueError):
        s.array[0] = 1.0
    d = json.loads(json.dumps(s.to_json()))
    assert d["params"]["g_b"] == 0.01
    assert len(d["sigma"]) == len(s.momenta)
    assert s[100] == 0.0


def test_delta_m_first_order():
    c = CutoffFamily(2, 1)
    base = z4_sum(lambda u: c.kappa(u, 1) / (u + 1.0), 0, int(c.support * 4))
    errs = []
    for g in (0.004, 0.002, 0.001):
        p = ModelParams(g, 1.0, 1.0, c)
        errs.append(abs(delta_m(p, solve_sigma_mr(p)) - 5 * g * base))
    # second-order remainder: quartering when g halves
    assert 3.5 < errs[0] / errs[1] < 4.5
    assert 3.5 < errs[1] / errs[2] < 4.5


def test_bare_mass():
    p = params(0.01, 1)
    s = solve_sigma_mr(p)
    assert bare_mass_sq(p, s) == pytest.approx(1.0 - delta_m(p, s))
    assert delta_m(p, s) == pytest.approx(4.399, abs=1e-3)


def _contraction_ratio(p, steps=8):
    s = np.zeros(len(solve_sigma_mr(p.replace(g_b=0.0)).momenta))
    res = []
    for _ in range(steps):
        new = sigma_map(p, s)
        res.append(float(np.max(np.abs(new - s))))
        s = new
    return res[-1] / res[-2]


def test_contraction_scales_with_coupling():
    r1 = _contraction_ratio(params(0.01))
    r2 = _contraction_ratio(params(0.005))
    r3 = _contraction_ratio(params(0.0025))
    assert r2 <= r1 / 2 and r3 <= r2 / 2
    it = [solve_sigma_mr(params(g)).iterations for g in (0.01, 0.005, 0.0025)]
    assert it[0] > it[1] > it[2]


def test_fold_for_positive_coupling():
    # past the end of the real branch the propagator loses positivity
    with pytest.raises(SolverError):
        solve_sigma_mr(params(0.05, 1))


def test_params_validation():
    with pytest.raises(ValueError):
        params(0.01, m2=0.0)
    with pytest.raises(ValueError):
        params(0.01, Zb=-1.0)
    with pytest.raises(ValueError):
        solve_sigma_mr(params(0.01), tol=0.0)
    p = params(0.01, 2)
    assert ModelParams.from_json(p.to_json()) == p


def test_effective_constant_boundaries():
    p = params(0.01, 2, Zb=1.1)
    k = effective_constants(p, solve_sigma_mr(p))
    assert k.j == (-1, 0, 1, 2)
    Z, gZ2, g = k.at(2)
    assert Z == 1.1 and gZ2 == p.coupling and g == 0.01


def test_coupling_decreases_towards_uv():
    for jm in (1, 2):
        p = params(0.01, jm)
        k = effective_constants(p, solve_sigma_mr(p))
        assert all(x > y for x, y in zip(k.g, k.g[1:]))
    k = effective_constants(params(0.01, 2), solve_sigma_mr(params(0.01, 2)))
    assert k.g == pytest.approx((0.018196, 0.014259, 0.011758, 0.01), abs=5e-6)


def test_renormalisation_condition():
    r = renormalize(0.005, 1.0, CutoffFamily(2, 1))
    assert r.constants.Z[0] == pytest.approx(1.0, abs=1e-12)
    assert r.constants.at(1)[0] == r.params.Z_b
    assert r.params.Z_b > 1.0
