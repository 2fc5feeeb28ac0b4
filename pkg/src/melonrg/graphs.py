"""Edge-coloured bipartite graphs for the quartic melonic model.

A Feynman graph of the rank-5 model is stored through its 6-coloured
extension: colour 0 is the propagator, colours 1..5 live inside the
interaction bubbles.  External legs are colour-0 half-edges.

Everything here works on immutable :class:`ColouredGraph` values.  Vertex
ids are ``0..n-1``; the JSON loader remaps arbitrary ids.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np

BLACK = "black"
WHITE = "white"
EXT = -1          # marker for an external (dangling) colour-0 leg
ABSENT = -2       # colour not carried by the graph (boundary graphs have no 0)

FAMILIES = (
    "vacuum-melon",
    "two-point-melon",
    "four-point-melon",
    "vacuum-necklace-monochrome",
    "vacuum-necklace-mixed",
    "convergent",
)


class GraphError(ValueError):
    """Invalid graph data or an operation outside its domain."""


@dataclass(frozen=True)
class ColouredGraph:
    """A properly edge-coloured bipartite graph with colour-0 external legs.

    ``edges`` holds ``(u, v, colour)`` triples, ``external`` holds
    ``(v, 0)`` pairs.  ``colours`` defaults to ``0..D``; boundary graphs use
    ``1..D``.  ``rings`` counts vertex-free colour-0 loops (only produced when
    the intermediate-field map is a lone bare vertex).
    """

    parity: tuple
    edges: tuple
    external: tuple = ()
    D: int = 5
    colours: tuple | None = None
    rings: int = 0

    def __post_init__(self):
        if self.colours is None:
            object.__setattr__(self, "colours", tuple(range(self.D + 1)))
        object.__setattr__(self, "parity", tuple(self.parity))
        object.__setattr__(self, "edges", tuple(tuple(int(x) for x in e) for e in self.edges))
        object.__setattr__(self, "external", tuple(tuple(int(x) for x in e) for e in self.external))
        self._validate()

    def _validate(self):
        n = len(self.parity)
        for p in self.parity:
            if p not in (BLACK, WHITE):
                raise GraphError(f"bad parity {p!r}")
        seen = [dict() for _ in range(n)]
        cols = set(self.colours)
        for u, v, c in self.edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u},{v},{c}) references unknown vertex")
            if c not in cols:
                raise GraphError(f"colour {c} outside {self.colours}")
            if self.parity[u] == self.parity[v]:
                raise GraphError(f"edge ({u},{v},{c}) joins vertices of equal parity")
            for x in (u, v):
                if c in seen[x]:
                    raise GraphError(f"vertex {x} carries colour {c} twice")
                seen[x][c] = True
        for v, c in self.external:
            if c != 0:
                raise GraphError("external edges must carry colour 0")
            if not 0 <= v < n:
                raise GraphError(f"external edge at unknown vertex {v}")
            if 0 in seen[v]:
                raise GraphError(f"vertex {v} carries colour 0 twice")
            seen[v][0] = True
        for x in range(n):
            if len(seen[x]) != len(cols):
                raise GraphError(f"vertex {x} is not {len(cols)}-regular")

    # -- basic counts -------------------------------------------------------
    @property
    def n_vertices(self) -> int:
        return len(self.parity)

    @property
    def n_external(self) -> int:
        return len(self.external)

    @property
    def n_internal(self) -> int:
        return len(self.edges)

    @property
    def is_closed(self) -> bool:
        return not self.external

    @cached_property
    def nbr(self) -> list:
        """``nbr[v][c]``: neighbour along colour c, EXT for a leg, ABSENT otherwise."""
        width = max(self.colours) + 1
        table = [[ABSENT] * width for _ in range(self.n_vertices)]
        for u, v, c in self.edges:
            table[u][c] = v
            table[v][c] = u
        for v, _ in self.external:
            table[v][0] = EXT
        return table

    @cached_property
    def leg_of_vertex(self) -> dict:
        return {v: i for i, (v, _) in enumerate(self.external)}

    @cached_property
    def n_components(self) -> int:
        return len(_components(self.n_vertices, [(u, v) for u, v, _ in self.edges])) + self.rings

    def to_json(self) -> dict:
        return {
            "D": self.D,
            "vertices": [{"id": i, "parity": p} for i, p in enumerate(self.parity)],
            "edges": [list(e) for e in self.edges],
            "external": [list(e) for e in self.external],
        }

    @classmethod
    def from_json(cls, data: dict) -> "ColouredGraph":
        try:
            D = int(data.get("D", 5))
            verts = data["vertices"]
            ids = [int(v["id"]) for v in verts]
            if len(set(ids)) != len(ids):
                raise GraphError("duplicate vertex ids")
            index = {vid: i for i, vid in enumerate(ids)}
            parity = [v["parity"] for v in verts]
            edges = [(index[int(u)], index[int(v)], int(c)) for u, v, c in data.get("edges", [])]
            ext = [(index[int(v)], int(c)) for v, c in data.get("external", [])]
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, GraphError):
                raise
            raise GraphError(f"malformed graph JSON: {exc}") from exc
        return cls(parity, edges, ext, D=D)


def _components(n, pairs):
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in pairs:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    groups = {}
    for x in range(n):
        groups.setdefault(find(x), []).append(x)
    return list(groups.values())


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------

def build_quartic_vertex(colour: int, D: int = 5) -> ColouredGraph:
    """The four-vertex bubble of the interaction of colour ``colour``.

    Vertex order is ``b1, w1, b2, w2``; ``(b1, w1)`` and ``(b2, w2)`` are the
    partner links (D-1 parallel edges each) and the two colour-c edges cross
    between them.  External legs are numbered like the vertices.
    """
    if not (isinstance(colour, int) and 1 <= colour <= D):
        raise GraphError(f"interaction colour must lie in 1..{D}, got {colour!r}")
    others = [i for i in range(1, D + 1) if i != colour]
    edges = [(0, 1, i) for i in others] + [(2, 3, i) for i in others]
    edges += [(0, 3, colour), (2, 1, colour)]
    return ColouredGraph((BLACK, WHITE, BLACK, WHITE), edges, [(v, 0) for v in range(4)], D=D)


def disjoint_union(*graphs: ColouredGraph) -> ColouredGraph:
    if not graphs:
        raise GraphError("nothing to join")
    D = graphs[0].D
    parity, edges, ext, shift, rings = [], [], [], 0, 0
    for g in graphs:
        if g.D != D or g.colours != graphs[0].colours:
            raise GraphError("cannot join graphs with different colour sets")
        parity += g.parity
        edges += [(u + shift, v + shift, c) for u, v, c in g.edges]
        ext += [(v + shift, c) for v, c in g.external]
        shift += g.n_vertices
        rings += g.rings
    return ColouredGraph(parity, edges, ext, D=D, colours=graphs[0].colours, rings=rings)


def glue(g: ColouredGraph, leg_a: int, leg_b: int) -> ColouredGraph:
    """Contract two external legs into an internal colour-0 edge."""
    n = g.n_external
    if not (0 <= leg_a < n and 0 <= leg_b < n):
        raise GraphError(f"unknown leg id ({leg_a}, {leg_b}); graph has {n} legs")
    if leg_a == leg_b:
        raise GraphError("cannot glue a leg to itself")
    u, v = g.external[leg_a][0], g.external[leg_b][0]
    if g.parity[u] == g.parity[v]:
        raise GraphError("glued legs must have opposite parity")
    ext = [e for i, e in enumerate(g.external) if i not in (leg_a, leg_b)]
    return ColouredGraph(g.parity, g.edges + ((u, v, 0),), ext, D=g.D, colours=g.colours,
                         rings=g.rings)


def model_graph(colours, zero_edges, D: int = 5) -> ColouredGraph:
    """Quartic bubbles of the given colours joined by colour-0 edges.

    Bubble k occupies vertices ``4k..4k+3`` (b1, w1, b2, w2).  ``zero_edges``
    lists ``(u, v)`` vertex pairs; every other vertex keeps an external leg.
    """
    pieces = [build_quartic_vertex(c, D) for c in colours]
    base = disjoint_union(*pieces) if pieces else None
    if base is None:
        raise GraphError("a model graph needs at least one bubble")
    used = set()
    edges = list(base.edges)
    for u, v in zero_edges:
        if u in used or v in used or u == v:
            raise GraphError(f"colour-0 edge ({u},{v}) reuses a leg")
        used.update((u, v))
        edges.append((u, v, 0))
    ext = [(x, 0) for x in range(base.n_vertices) if x not in used]
    return ColouredGraph(base.parity, edges, ext, D=D)


def recolour(g: ColouredGraph, perm: dict) -> ColouredGraph:
    """Apply a relabelling of colours 1..D (colour 0 is fixed)."""
    mapping = {c: perm.get(c, c) for c in g.colours}
    if sorted(mapping.values()) != sorted(g.colours) or mapping.get(0, 0) != 0:
        raise GraphError("recolouring must permute 1..D and fix 0")
    edges = [(u, v, mapping[c]) for u, v, c in g.edges]
    return ColouredGraph(g.parity, edges, g.external, D=g.D, colours=g.colours, rings=g.rings)


def fundamental_vacuum_melon(colour: int = 1) -> ColouredGraph:
    # close each partner link on itself: b1-w1 and b2-w2
    return model_graph([colour], [(0, 1), (2, 3)])


def fundamental_two_point_melon(colour: int = 1) -> ColouredGraph:
    return model_graph([colour], [(0, 1)])


def fundamental_four_point_melon(colour: int = 1) -> ColouredGraph:
    """Two bubbles of the same colour forming the one-loop four-point chain."""
    # w2(A)=3 -> b1(B)=4, w1(B)=5 -> b2(A)=2
    return model_graph([colour, colour], [(4, 3), (2, 5)])


def necklace(colours) -> ColouredGraph:
    """Closed chain of bubbles, consecutive ones joined by two colour-0 edges.

    With a single colour this is the quadratically divergent vacuum necklace,
    with two or more distinct colours the broken (logarithmic) one.
    """
    colours = list(colours)
    k = len(colours)
    if k == 0:
        raise GraphError("empty necklace")
    zero = []
    for i in range(k):
        j = (i + 1) % k
        # second partner link of bubble i against first partner link of bubble j
        b2, w2 = 4 * i + 2, 4 * i + 3
        b1, w1 = 4 * j, 4 * j + 1
        zero += [(b1, w2), (b2, w1)]
    return model_graph(colours, zero)


def four_point_chain(colours) -> ColouredGraph:
    """Open chain of bubbles; the two end partner links keep their legs."""
    colours = list(colours)
    zero = []
    for i in range(len(colours) - 1):
        b2, w2 = 4 * i + 2, 4 * i + 3
        b1, w1 = 4 * (i + 1), 4 * (i + 1) + 1
        zero += [(b1, w2), (b2, w1)]
    return model_graph(colours, zero)


# ---------------------------------------------------------------------------
# bubbles and faces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Bubble:
    colour_set: frozenset
    vertex_ids: frozenset
    is_cyclic: bool | None


def bubbles(g: ColouredGraph, colours) -> list:
    cols = frozenset(colours)
    bad = cols - set(g.colours)
    if bad:
        raise GraphError(f"colours {sorted(bad)} not carried by the graph")
    pairs = [(u, v) for u, v, c in g.edges if c in cols]
    out = []
    has_leg = 0 in cols
    for comp in sorted(_components(g.n_vertices, pairs)):
        cyc = None
        if len(cols) == 2:
            cyc = not (has_leg and any(g.nbr[x][0] == EXT for x in comp))
        out.append(Bubble(cols, frozenset(comp), cyc))
    return out


@dataclass(frozen=True)
class FaceCounts:
    F: int
    F0: int
    F_empty: int
    F0c: dict


def _cyclic_faces(g: ColouredGraph, i: int, j: int) -> int:
    """Count bicoloured cycles of colours i, j by walking."""
    nbr = g.nbr
    seen = [False] * g.n_vertices
    count = 0
    for start in range(g.n_vertices):
        if seen[start]:
            continue
        # walk both directions from start; cyclic iff we return to start
        x, col, closed = start, i, False
        seen[start] = True
        path_ok = True
        while True:
            y = nbr[x][col]
            if y < 0:
                path_ok = False
                break
            col = j if col == i else i
            if y == start:
                closed = True
                break
            seen[y] = True
            x = y
        if not path_ok:
            x, col = start, j
            while True:
                y = nbr[x][col]
                if y < 0:
                    break
                seen[y] = True
                col = j if col == i else i
                x = y
        count += closed
    return count


def face_counts(g: ColouredGraph) -> FaceCounts:
    cols = g.colours
    F0c, F_empty = {}, 0
    for i, j in itertools.combinations(cols, 2):
        n = _cyclic_faces(g, i, j)
        if i == 0:
            F0c[j] = n
        else:
            F_empty += n
    F0 = sum(F0c.values())
    return FaceCounts(F0 + F_empty, F0, F_empty, F0c)


# ---------------------------------------------------------------------------
# jackets
# ---------------------------------------------------------------------------

def cyclic_orders(colours) -> list:
    """All cyclic permutations of ``colours`` in cycle notation, first entry fixed."""
    colours = tuple(colours)
    first, rest = colours[0], colours[1:]
    return [(first,) + p for p in itertools.permutations(rest)]


@lru_cache(maxsize=16)
def _all_orders(cols):
    return tuple(cyclic_orders(cols))


def _as_cycle(tau, colours) -> tuple:
    colours = tuple(colours)
    if isinstance(tau, dict):
        if sorted(tau) != sorted(colours) or sorted(tau.values()) != sorted(colours):
            raise GraphError("tau is not a permutation of the colour set")
        cyc, x = [colours[0]], tau[colours[0]]
        while x != colours[0]:
            cyc.append(x)
            x = tau[x]
        if len(cyc) != len(colours):
            raise GraphError("tau is not a cyclic permutation")
        return tuple(cyc)
    tau = tuple(tau)
    if sorted(tau) != sorted(colours):
        raise GraphError("tau must list every colour exactly once (cycle notation)")
    return tau


def _count_cycles(perm: np.ndarray) -> np.ndarray:
    """Number of cycles of each row of a batch of permutations."""
    T, H = perm.shape
    if H == 0:
        return np.zeros(T, dtype=np.int64)
    lab = np.broadcast_to(np.arange(H), (T, H)).copy()
    p = perm.copy()
    rows = np.arange(T)[:, None]
    for _ in range(max(1, int(math.ceil(math.log2(H))) + 1)):
        lab = np.minimum(lab, lab[rows, p])
        p = p[rows, p]
    return (lab == np.arange(H)).sum(axis=1)


@lru_cache(maxsize=64)
def _rotation_tables(cols, taus):
    """Successor tables (T, 4, K): black, white, black-with-leg, white-with-leg."""
    K = len(cols)
    cidx = {c: k for k, c in enumerate(cols)}
    z = cidx.get(0)
    tab = np.zeros((len(taus), 4, K), dtype=np.int64)
    for t, tau in enumerate(taus):
        order = [cidx[c] for c in tau]
        succ = {order[m]: order[(m + 1) % K] for m in range(K)}
        pred = {order[m]: order[(m - 1) % K] for m in range(K)}
        for ci in range(K):
            s, p = succ[ci], pred[ci]
            tab[t, 0, ci], tab[t, 1, ci] = s, p
            if s == z:
                s = succ[s]
            if p == z:
                p = pred[p]
            tab[t, 2, ci], tab[t, 3, ci] = s, p
    tab.flags.writeable = False
    return tab


def jacket_genera(g: ColouredGraph, taus=None) -> np.ndarray:
    """Genus of the jacket ribbon graph for each cyclic order in ``taus``.

    Black vertices get the rotation tau, white ones tau^-1; external legs are
    deleted, so a vertex with a leg skips colour 0 in its rotation.  The
    faces are the cycles of rotation∘edge-involution on internal half-edges.
    """
    cols = tuple(g.colours)
    K = len(cols)
    taus = _all_orders(cols) if taus is None else tuple(_as_cycle(t, cols) for t in taus)
    T = len(taus)
    n = g.n_vertices
    if n == 0:
        return np.zeros(T, dtype=np.int64)
    cidx = {c: k for k, c in enumerate(cols)}
    nbr = g.nbr
    H = n * K
    alpha = np.arange(H)
    kind = np.zeros(H, dtype=np.int64)
    active = np.zeros(H, dtype=bool)
    for v in range(n):
        has_leg = 0 in cidx and nbr[v][0] == EXT
        k0 = (0 if g.parity[v] == BLACK else 1) + (2 if has_leg else 0)
        for c in cols:
            h = v * K + cidx[c]
            kind[h] = k0
            u = nbr[v][c]
            if u >= 0:
                active[h] = True
                alpha[h] = u * K + cidx[c]
    tab = _rotation_tables(cols, tuple(taus))
    vert = np.arange(H) // K
    ci_arr = np.arange(H) % K
    sigma = vert[None, :] * K + tab[:, kind, ci_arr]
    phi = np.where(active[None, :], sigma[:, alpha], np.arange(H)[None, :])
    faces = _count_cycles(phi) - int((~active).sum())
    e = g.n_internal
    C = g.n_components - g.rings
    twice = 2 * C - faces + e - n
    if np.any(twice % 2) or np.any(twice < 0):
        raise GraphError("Euler relation produced a non-integral or negative genus")
    return twice // 2


def jacket_genus(g: ColouredGraph, tau) -> int:
    return int(jacket_genera(g, [tau])[0])


def boundary_graph(g: ColouredGraph) -> ColouredGraph:
    """Graph on the external legs whose edges are the external paths."""
    if 0 not in g.colours:
        raise GraphError("boundary graphs need a colour-0 structure")
    cols = tuple(c for c in g.colours if c != 0)
    parity = [g.parity[v] for v, _ in g.external]
    leg = g.leg_of_vertex
    nbr = g.nbr
    edges = []
    for start, _ in g.external:
        if g.parity[start] != WHITE:
            continue
        for i in cols:
            x = start
            while True:
                y = nbr[x][i]
                z = nbr[y][0]
                if z == EXT:
                    break
                x = z
            edges.append((leg[start], leg[y], i))
    return ColouredGraph(parity, edges, (), D=g.D, colours=cols)


def boundary_components(g: ColouredGraph) -> int:
    return 0 if g.is_closed else boundary_graph(g).n_components


def jacket_sum(g: ColouredGraph) -> int:
    return int(jacket_genera(g).sum())


def gurau_degree(g: ColouredGraph) -> Fraction:
    """Reduced degree: jacket genus sums of G minus those of its boundary."""
    total = jacket_sum(g)
    if not g.is_closed:
        total -= jacket_sum(boundary_graph(g))
    return Fraction(total, math.factorial(g.D - 1))


def face_formula_degree(g: ColouredGraph) -> Fraction:
    """Degree from bubble counts: D(D-1)V/4 + D*C - F - C(dG) - (D-1)E/2."""
    D = g.D
    F = face_counts(g).F
    return (Fraction(D * (D - 1) * g.n_vertices, 4) + D * g.n_components - F
            - boundary_components(g) - Fraction((D - 1) * g.n_external, 2))


def degree_face_consistency(g: ColouredGraph) -> bool:
    return gurau_degree(g) == face_formula_degree(g)


# ---------------------------------------------------------------------------
# model-graph structure and divergence
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Interaction:
    """One quartic bubble: its colour and its two partner links (black, white)."""
    colour: int
    links: tuple


def interactions(g: ColouredGraph) -> list:
    """Decompose a model graph into its quartic bubbles; raise if malformed."""
    if 0 not in g.colours or g.rings:
        raise GraphError("not a model graph")
    D = g.D
    nbr = g.nbr
    out = []
    for comp in bubbles(g, range(1, D + 1)):
        vs = sorted(comp.vertex_ids)
        if len(vs) != 4:
            raise GraphError(f"interaction bubble with {len(vs)} vertices")
        colour = None
        links = []
        for v in vs:
            targets = {}
            for c in range(1, D + 1):
                targets.setdefault(nbr[v][c], []).append(c)
            sizes = sorted(len(x) for x in targets.values())
            if sizes != [1, D - 1]:
                raise GraphError("bubble is not a quartic melonic vertex")
            for u, cs in targets.items():
                if len(cs) == 1:
                    if colour not in (None, cs[0]):
                        raise GraphError("inconsistent bubble colour")
                    colour = cs[0]
                elif g.parity[v] == BLACK:
                    links.append((v, u))
        out.append(Interaction(colour, tuple(sorted(links))))
    return out


def internal_zero_edges(g: ColouredGraph) -> int:
    return sum(1 for _, _, c in g.edges if c == 0)


def divergence_degree(g: ColouredGraph) -> int:
    """Superficial degree of divergence 4 - E - (C(dG) - 1) - degree."""
    return _omega(g, None)


def _omega(g, deg):
    interactions(g)
    if g.n_components != 1:
        raise GraphError("divergence degree needs a connected graph")
    if deg is None:
        deg = gurau_degree(g)
    if deg.denominator != 1:
        raise GraphError(f"non-integral degree {deg}")
    return int(4 - g.n_external - (boundary_components(g) - 1) - deg)


def divergence_degree_from_faces(g: ColouredGraph) -> int:
    """Power counting directly: -2 per propagator, +1 per colour-0 face."""
    return -2 * internal_zero_edges(g) + face_counts(g).F0


@dataclass(frozen=True)
class DivergenceClass:
    external_count: int
    boundary_components: int
    gurau_degree: Fraction
    divergence_degree: int
    family: str

    def to_json(self) -> dict:
        deg = self.gurau_degree
        return {
            "E": self.external_count,
            "C_boundary": self.boundary_components,
            "degree": int(deg) if deg.denominator == 1 else str(deg),
            "omega": self.divergence_degree,
            "family": self.family,
        }


def family_tag(E: int, degree, omega: int) -> str:
    if omega < 0:
        return "convergent"
    if E == 4 and omega == 0:
        return "four-point-melon"
    if E == 2 and omega == 2:
        return "two-point-melon"
    if E == 0 and degree == 0:
        return "vacuum-melon"
    if E == 0 and degree == 3:
        return "vacuum-necklace-monochrome"
    if E == 0 and degree == 5:
        return "vacuum-necklace-mixed"
    raise GraphError(f"divergent graph outside the known families: E={E}, degree={degree}")


def classify(g: ColouredGraph) -> DivergenceClass:
    deg = gurau_degree(g)
    omega = _omega(g, deg)
    E = g.n_external
    return DivergenceClass(E, boundary_components(g), deg, omega, family_tag(E, deg, omega))


def boundary_colour(g: ColouredGraph) -> int | None:
    """Colour c when the boundary is a single quartic bubble of colour c."""
    if g.n_external != 4:
        return None
    b = boundary_graph(g)
    if b.n_components != 1:
        return None
    nbr = b.nbr
    cols = list(b.colours)
    found = set()
    for v in range(4):
        targets = {}
        for c in cols:
            targets.setdefault(nbr[v][c], []).append(c)
        groups = sorted(targets.values(), key=len)
        if [len(x) for x in groups] != [1, len(cols) - 1]:
            return None
        found.add(groups[0][0])
    return found.pop() if len(found) == 1 else None


def zero_bridges(g: ColouredGraph) -> list:
    """Internal colour-0 edges whose removal disconnects the graph."""
    out = []
    base = g.n_components
    for k, (u, v, c) in enumerate(g.edges):
        if c != 0:
            continue
        rest = [(a, b) for m, (a, b, _) in enumerate(g.edges) if m != k]
        if len(_components(g.n_vertices, rest)) + g.rings > base:
            out.append((u, v))
    return out


def is_one_particle_irreducible(g: ColouredGraph) -> bool:
    return not zero_bridges(g)


# ---------------------------------------------------------------------------
# canonical forms
# ---------------------------------------------------------------------------

def _rooted_code(g: ColouredGraph, root: int, order_cols) -> tuple:
    nbr = g.nbr
    label = {root: 0}
    queue = [root]
    code = []
    k = 0
    while k < len(queue):
        v = queue[k]
        k += 1
        for c in order_cols:
            u = nbr[v][c]
            if u < 0:
                code.append(u)
                continue
            if u not in label:
                label[u] = len(queue)
                queue.append(u)
            code.append(label[u])
    return tuple(code), frozenset(queue)


def canonical_code(g: ColouredGraph, root: int | None = None) -> tuple:
    """Complete isomorphism invariant (colour- and parity-preserving).

    In a connected properly coloured graph a single vertex image fixes the
    whole isomorphism, so the minimum over black roots of the BFS code is
    canonical.  Disconnected graphs give the sorted tuple of component codes.
    With ``root`` given, the code of the rooted graph is returned.
    """
    cols = tuple(sorted(g.colours))
    if root is not None:
        return (g.parity[root],) + _rooted_code(g, root, cols)[0]
    comps = []
    done = set()
    for comp in _components(g.n_vertices, [(u, v) for u, v, _ in g.edges]):
        if comp[0] in done:
            continue
        done.update(comp)
        roots = [v for v in comp if g.parity[v] == BLACK] or comp
        comps.append(min((g.parity[r],) + _rooted_code(g, r, cols)[0] for r in roots))
    return (g.rings, tuple(sorted(comps)))


def is_isomorphic(g1: ColouredGraph, g2: ColouredGraph) -> bool:
    if g1.colours != g2.colours or g1.n_vertices != g2.n_vertices:
        return False
    return canonical_code(g1) == canonical_code(g2)
