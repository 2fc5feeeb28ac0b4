import itertools
import json
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from melonrg import census, graphs
from melonrg.graphs import (
    BLACK,
    GraphError,
    boundary_components,
    boundary_graph,
    bubbles,
    build_quartic_vertex,
    classify,
    degree_face_consistency,
    divergence_degree,
    divergence_degree_from_faces,
    face_counts,
    face_formula_degree,
    fundamental_four_point_melon,
    fundamental_two_point_melon,
    fundamental_vacuum_melon,
    glue,
    gurau_degree,
    is_isomorphic,
    jacket_genus,
    jacket_sum,
    necklace,
    four_point_chain,
    recolour,
)


# -- independent oracles -----------------------------------------------------

def _union_find_count(n, pairs):
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in pairs:
        parent[find(a)] = find(b)
    return len({find(x) for x in range(n)})


def closed_jacket_genus(g, tau):
    """Jacket faces of a closed graph are the (tau_k, tau_k+1) bicoloured cycles."""
    V, e = g.n_vertices, g.n_internal
    C = _union_find_count(V, [(u, v) for u, v, _ in g.edges])
    F = 0
    for k in range(len(tau)):
        a, b = tau[k], tau[(k + 1) % len(tau)]
        pairs = [(u, v) for u, v, c in g.edges if c in (a, b)]
        F += _union_find_count(V, pairs)  # every vertex lies on exactly one cycle
    twice = 2 * C - F + e - V
    assert twice % 2 == 0
    return twice // 2


def ribbon_genus(g, tau):
    """Plain face walk on the ribbon graph with legs deleted."""
    other = {}
    for u, v, c in g.edges:
        other[(u, c)] = (v, c)
        other[(v, c)] = (u, c)
    present = {}
    for v in range(g.n_vertices):
        cyc = list(tau) if g.parity[v] == BLACK else list(reversed(tau))
        present[v] = [c for c in cyc if (v, c) in other]

    def rot(h):
        v, c = h
        cyc = present[v]
        return (v, cyc[(cyc.index(c) + 1) % len(cyc)])

    seen = set()
    faces = 0
    for h in other:
        if h in seen:
            continue
        faces += 1
        x = h
        while x not in seen:
            seen.add(x)
            x = rot(other[x])
    V, e = g.n_vertices, g.n_internal
    C = _union_find_count(V, [(u, v) for u, v, _ in g.edges])
    twice = 2 * C - faces + e - V
    assert twice % 2 == 0 and twice >= 0
    return twice // 2


def oracle_degree(g):
    orders = graphs.cyclic_orders(g.colours)
    s = sum(ribbon_genus(g, t) for t in orders)
    if not g.is_closed:
        b = boundary_graph(g)
        s -= sum(ribbon_genus(b, t) for t in graphs.cyclic_orders(b.colours))
    return Fraction(s, math.factorial(g.D - 1))


# -- quartic vertex and gluing -----------------------------------------------

def test_quartic_vertex_shape():
    g = build_quartic_vertex(1)
    assert g.n_vertices == 4
    assert g.n_internal == 10
    assert g.n_external == 4
    assert all(c == 0 for _, c in g.external)


def test_quartic_vertex_colour_symmetry():
    g3 = build_quartic_vertex(3)
    g1 = build_quartic_vertex(1)
    assert not is_isomorphic(g1, g3)
    assert is_isomorphic(recolour(g3, {3: 1, 1: 3}), g1)


@pytest.mark.parametrize("bad", [0, 6, -1])
def test_quartic_vertex_rejects_colour(bad):
    with pytest.raises(GraphError):
        build_quartic_vertex(bad)


def test_glue_to_vacuum_melon():
    g = build_quartic_vertex(2)
    g = glue(g, 0, 1)   # b1-w1
    g = glue(g, 0, 1)   # b2-w2 (legs renumbered)
    assert g.is_closed
    assert is_isomorphic(g, fundamental_vacuum_melon(2))


def test_glue_to_two_point_melon():
    g = glue(build_quartic_vertex(1), 0, 1)
    assert g.n_external == 2
    assert is_isomorphic(g, fundamental_two_point_melon(1))


def test_glue_errors():
    g = build_quartic_vertex(1)
    with pytest.raises(GraphError):
        glue(g, 0, 2)  # both black
    with pytest.raises(GraphError):
        glue(g, 0, 7)
    with pytest.raises(GraphError):
        glue(g, 1, 1)


def test_invalid_graphs_rejected():
    with pytest.raises(GraphError):
        graphs.ColouredGraph(("black", "black"), [(0, 1, 0)], D=0)
    with pytest.raises(GraphError):
        graphs.ColouredGraph(("black", "white"), [(0, 1, 0)], D=1)  # colour 1 missing
    with pytest.raises(GraphError):
        graphs.ColouredGraph(("black", "white"), [(0, 1, 0), (0, 1, 1)], [(0, 0)], D=1)


# -- bubbles and faces -------------------------------------------------------

def test_two_point_melon_external_path():
    g = fundamental_two_point_melon(3)
    bs = bubbles(g, {0, 3})
    assert any(b.is_cyclic is False for b in bs)


def test_closed_bubbles_cyclic():
    g = fundamental_vacuum_melon(1)
    for i in range(1, 6):
        assert all(b.is_cyclic for b in bubbles(g, {0, i}))


def test_empty_colour_set_one_bubble_per_vertex():
    g = fundamental_four_point_melon(1)
    assert len(bubbles(g, ())) == g.n_vertices


@pytest.mark.parametrize("g, F0", [
    (fundamental_two_point_melon(1), 4),
    (fundamental_vacuum_melon(1), 9),
    (build_quartic_vertex(1), 0),
])
def test_face_counts_examples(g, F0):
    fc = face_counts(g)
    assert fc.F0 == F0
    assert fc.F == fc.F0 + fc.F_empty


def test_single_vertex_empty_faces():
    assert face_counts(build_quartic_vertex(4)).F_empty == 16


# -- jackets and degree ------------------------------------------------------

CLOSED_SAMPLES = [
    fundamental_vacuum_melon(1),
    necklace([1]),
    necklace([1, 1, 1]),
    necklace([1, 2]),
    necklace([2, 3, 5, 1]),
]


@pytest.mark.parametrize("g", CLOSED_SAMPLES)
def test_jacket_genus_matches_bicoloured_cycle_count(g):
    for tau in graphs.cyclic_orders(g.colours):
        assert jacket_genus(g, tau) == closed_jacket_genus(g, tau)


def test_jacket_genus_open_graphs_vs_face_walk():
    rng = random.Random(11)
    for _ in range(20):
        g = census.random_gluing(rng.randint(1, 4), rng)
        for tau in rng.sample(graphs.cyclic_orders(g.colours), 6):
            assert jacket_genus(g, tau) == ribbon_genus(g, tau)


def test_jacket_genus_additive():
    g = necklace([1, 2])
    two = graphs.disjoint_union(g, g)
    for tau in graphs.cyclic_orders(g.colours)[:10]:
        assert jacket_genus(two, tau) == 2 * jacket_genus(g, tau)


def test_jacket_rejects_non_permutation():
    g = fundamental_vacuum_melon(1)
    with pytest.raises(GraphError):
        jacket_genus(g, (0, 1, 2, 3, 4))
    with pytest.raises(GraphError):
        jacket_genus(g, {0: 1, 1: 0, 2: 3, 3: 2, 4: 5, 5: 4})


def test_planar_jacket_melon():
    # a melon has a planar jacket for every tau
    g = fundamental_vacuum_melon(1)
    assert jacket_sum(g) == 0


@pytest.mark.parametrize("g, deg", [
    (fundamental_vacuum_melon(1), 0),
    (fundamental_two_point_melon(4), 0),
    (fundamental_four_point_melon(2), 0),
    (four_point_chain([1, 1, 1]), 0),
    (necklace([1]), 3),
    (necklace([2, 2]), 3),
    (necklace([1, 1, 1, 1]), 3),
    (necklace([1, 2]), 5),
    (necklace([1, 2, 1]), 5),
])
def test_degree_examples(g, deg):
    assert gurau_degree(g) == deg
    assert oracle_degree(g) == deg
    assert face_formula_degree(g) == deg


def test_closed_degree_formula():
    for g in CLOSED_SAMPLES:
        D, V = g.D, g.n_vertices
        want = Fraction(D * (D - 1) * V, 4) + D * g.n_components - face_counts(g).F
        assert gurau_degree(g) == want


def test_boundary_graphs():
    b = boundary_graph(fundamental_four_point_melon(3))
    assert b.n_vertices == 4 and b.n_components == 1
    assert graphs.boundary_colour(fundamental_four_point_melon(3)) == 3
    b2 = boundary_graph(fundamental_two_point_melon(1))
    assert b2.n_vertices == 2 and b2.n_components == 1
    assert boundary_graph(necklace([1, 2])).n_vertices == 0
    assert boundary_components(necklace([1, 2])) == 0


# -- divergence --------------------------------------------------------------

@pytest.mark.parametrize("g, omega", [
    (fundamental_four_point_melon(1), 0),
    (fundamental_two_point_melon(1), 2),
    (fundamental_vacuum_melon(1), 5),
])
def test_divergence_examples(g, omega):
    assert divergence_degree(g) == omega
    assert divergence_degree_from_faces(g) == omega


def test_classify_examples():
    c = classify(four_point_chain([5, 5]))
    assert (c.family, c.divergence_degree) == ("four-point-melon", 0)
    c = classify(necklace([1, 2, 1, 3]))
    assert (c.family, c.divergence_degree) == ("vacuum-necklace-mixed", 0)
    c = classify(necklace([4, 4]))
    assert (c.family, c.divergence_degree) == ("vacuum-necklace-monochrome", 2)
    c = classify(graphs.model_graph([1, 2], [(2, 5)]))  # tree of two bubbles, E=6
    assert c.external_count == 6
    assert c.family == "convergent" and c.divergence_degree <= -2


def test_bichromatic_chain_convergent():
    c = classify(four_point_chain([1, 2]))
    assert c.family == "convergent"
    assert c.divergence_degree < 0


def test_divergence_rejects_non_model_graph():
    g = boundary_graph(fundamental_four_point_melon(1))
    with pytest.raises(GraphError):
        divergence_degree(g)


def test_classification_json():
    d = classify(fundamental_two_point_melon(1)).to_json()
    assert d == {"E": 2, "C_boundary": 1, "degree": 0, "omega": 2, "family": "two-point-melon"}


def test_graph_json_roundtrip():
    g = fundamental_four_point_melon(2)
    h = graphs.ColouredGraph.from_json(json.loads(json.dumps(g.to_json())))
    assert h == g


def test_graph_json_ids_remapped():
    data = {"D": 1,
            "vertices": [{"id": 10, "parity": "black"}, {"id": 20, "parity": "white"}],
            "edges": [[10, 20, 1]], "external": [[10, 0], [20, 0]]}
    g = graphs.ColouredGraph.from_json(data)
    assert g.edges == ((0, 1, 1),)


@pytest.mark.parametrize("data", [
    {"vertices": [{"id": 0}]},
    {"vertices": [{"id": 0, "parity": "black"}, {"id": 0, "parity": "white"}]},
    {"vertices": [{"id": 0, "parity": "black"}], "edges": [[0, 5, 1]]},
    {},
])
def test_graph_json_malformed(data):
    with pytest.raises(GraphError):
        graphs.ColouredGraph.from_json(data)


# -- census-wide properties --------------------------------------------------

def test_census_order3_consistency(census3):
    for e in census3:
        g = e.graph()
        assert degree_face_consistency(g)
        assert divergence_degree(g) == divergence_degree_from_faces(g)
        if g.n_external == 2:
            assert boundary_components(g) == 1


def test_closed_degree_integral_and_gap(census4):
    """Closed census graphs: integral degree, and positive degree means >= D - 2."""
    seen_positive = 0
    for e in census4:
        if e.n_external:
            continue
        g = e.graph()
        s = jacket_sum(g)
        deg = gurau_degree(g)
        assert deg.denominator == 1
        assert 4 * math.factorial(g.D - 1) * deg == 4 * s
        assert deg >= 0
        if deg > 0:
            seen_positive += 1
            assert deg >= g.D - 2
    assert seen_positive > 0


def test_random_gluings_degree_face(seed=2024):
    rng = random.Random(seed)
    for order in (5, 6):
        for _ in range(500):
            g = census.random_gluing(order, rng)
            assert degree_face_consistency(g)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), order=st.integers(1, 4),
       perm=st.permutations(range(1, 6)))
def test_colour_permutation_equivariance(seed, order, perm):
    g = census.random_gluing(order, random.Random(seed))
    h = recolour(g, dict(zip(range(1, 6), perm)))
    assert face_counts(h).F == face_counts(g).F
    assert gurau_degree(h) == gurau_degree(g)
    assert divergence_degree(h) == divergence_degree(g)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), order=st.integers(1, 5))
def test_degree_nonnegative_and_matches_oracle(seed, order):
    g = census.random_gluing(order, random.Random(seed))
    d = gurau_degree(g)
    assert d >= 0
    if order <= 3:
        assert d == oracle_degree(g)


def test_census_order_counts_small(census3):
    by_order = {}
    for e in census3:
        by_order[e.order] = by_order.get(e.order, 0) + 1
    assert by_order[1] == 5
    assert sum(by_order.values()) == 1102


def test_isomorphism_up_to_relabelling():
    g = necklace([1, 2, 3])
    perm = list(range(g.n_vertices))
    random.Random(3).shuffle(perm)
    inv = {old: new for new, old in enumerate(perm)}
    parity = [g.parity[old] for old in perm]
    edges = [(inv[u], inv[v], c) for u, v, c in g.edges]
    h = graphs.ColouredGraph(parity, edges, [], D=g.D)
    assert is_isomorphic(g, h)
    assert not is_isomorphic(g, necklace([1, 1, 3]))


def test_cyclic_order_counts():
    assert len(graphs.cyclic_orders(range(6))) == 120
    assert len(graphs.cyclic_orders(range(1, 6))) == 24
