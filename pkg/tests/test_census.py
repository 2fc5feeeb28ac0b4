import random

import pytest

from melonrg import census, graphs, series
from melonrg.census import generate, gamma4_census, random_gluing, state_code


def test_order_one_states():
    entries = generate(1)
    assert len(entries) == 5
    assert sorted(e.n_external for e in entries) == [0, 0, 2, 2, 4]


def test_no_duplicate_classes(census3):
    codes = [graphs.canonical_code(e.graph()) for e in census3]
    # classes are taken up to colour relabelling, so colour-exact codes are distinct too
    assert len(set(codes)) == len(codes)


def test_all_connected(census3):
    assert all(e.graph().n_components == 1 for e in census3)


def test_census_is_exhaustive_against_random_gluings(census3):
    """Every random connected gluing of <= 3 bubbles appears up to colour relabelling."""
    known = {state_code(e.colours, e.zero, up_to_colours=True) for e in census3}
    rng = random.Random(5)
    for _ in range(300):
        g = random_gluing(rng.randint(1, 3), rng)
        assert _state_of(g) in known


def _state_of(g):
    # model graphs from model_graph keep bubble k on vertices 4k..4k+3
    n = g.n_vertices // 4
    colours = []
    for k in range(n):
        b1, w2 = 4 * k, 4 * k + 3
        colours.append(next(c for u, v, c in g.edges if {u, v} == {b1, w2} and c != 0))
    zero = [census.FREE] * g.n_vertices
    for u, v, c in g.edges:
        if c == 0:
            zero[u], zero[v] = v, u
    return state_code(tuple(colours), tuple(zero), up_to_colours=True)


def test_melonic_generation_matches_degree_zero(census4):
    mel = generate(4, melonic=True)
    exhaustive = {state_code(e.colours, e.zero, True) for e in census4
                  if graphs.face_formula_degree(e.graph()) == 0}
    got = {state_code(e.colours, e.zero, True) for e in mel}
    assert got == exhaustive
    assert len(mel) == 2753


def test_melonic_entries_have_degree_zero():
    for e in generate(3, melonic=True):
        assert graphs.gurau_degree(e.graph()) == 0


def test_gamma4_census_low_orders():
    assert gamma4_census(4) == {1: 1, 2: 1, 3: 11, 4: 146}


def test_gamma4_census_matches_gf_order5():
    counts = gamma4_census(5)
    gf = series.gamma4_gf_series(5)
    assert [counts[n] for n in range(1, 6)] == [int(gf[n]) for n in range(1, 6)]


def test_keep_pruning():
    few = generate(3, keep=lambda colours, zero: len(colours) <= 2)
    assert max(e.order for e in few) == 2
    assert len(few) == sum(1 for e in generate(2))


def test_random_gluing_seeded():
    a = random_gluing(4, random.Random(9))
    b = random_gluing(4, random.Random(9))
    assert a == b
    assert a.n_components == 1


@pytest.mark.parametrize("order", [1, 2, 5])
def test_random_gluing_is_model_graph(order):
    g = random_gluing(order, random.Random(order))
    assert len(graphs.interactions(g)) == order
