"""Intermediate-field coloured maps.

Each interaction bubble of a model graph becomes an edge (coloured by the
bubble's distinguished colour), each partner link becomes a half-edge, and
each maximal alternating sequence of colour-0 edges and partner links becomes
a vertex.  Sequences that end on external legs are open; the corresponding
vertex carries a cilium at the corner where the legs sit.

Orientation convention: a partner link is entered at its white vertex and
left at its black one, whose colour-0 edge leads to the white vertex of the
next half-edge in the rotation.  A cilium at position ``pos`` of a vertex
sits in the corner just before ``vertices[v][pos]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .graphs import (
    BLACK,
    EXT,
    ColouredGraph,
    DivergenceClass,
    GraphError,
    _components,
    family_tag,
    interactions,
    model_graph,
)


class MapError(ValueError):
    """Malformed coloured map."""


@dataclass(frozen=True)
class ColouredMap:
    vertices: tuple
    edges: tuple
    cilia: tuple = ()
    D: int = 5

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(tuple(int(h) for h in v) for v in self.vertices))
        object.__setattr__(self, "edges", tuple(tuple(int(x) for x in e) for e in self.edges))
        cil = tuple(sorted(tuple(int(x) for x in c) for c in self.cilia))
        object.__setattr__(self, "cilia", cil)
        self._validate()

    def _validate(self):
        where = {}
        for v, cyc in enumerate(self.vertices):
            for h in cyc:
                if h in where:
                    raise MapError(f"half-edge {h} appears twice")
                where[h] = v
        paired = set()
        for a, b, c in self.edges:
            for h in (a, b):
                if h not in where:
                    raise MapError(f"edge uses unknown half-edge {h}")
                if h in paired:
                    raise MapError(f"half-edge {h} in two edges")
                paired.add(h)
            if a == b:
                raise MapError("an edge needs two distinct half-edges")
            if not 1 <= c <= self.D:
                raise MapError(f"edge colour {c} outside 1..{self.D}")
        if paired != set(where):
            raise MapError("unpaired half-edges")
        marked = set()
        for v, pos in self.cilia:
            if not 0 <= v < len(self.vertices):
                raise MapError(f"cilium on unknown vertex {v}")
            if v in marked:
                raise MapError(f"vertex {v} carries two cilia")
            marked.add(v)
            if not 0 <= pos < max(1, len(self.vertices[v])):
                raise MapError(f"cilium position {pos} out of range at vertex {v}")

    # -- combinatorial structure ----------------------------------------------
    @cached_property
    def vertex_of(self) -> dict:
        return {h: v for v, cyc in enumerate(self.vertices) for h in cyc}

    @cached_property
    def sigma(self) -> dict:
        """Next half-edge in the rotation."""
        out = {}
        for cyc in self.vertices:
            for k, h in enumerate(cyc):
                out[h] = cyc[(k + 1) % len(cyc)]
        return out

    @cached_property
    def alpha(self) -> dict:
        out = {}
        for a, b, _ in self.edges:
            out[a], out[b] = b, a
        return out

    @cached_property
    def colour_of(self) -> dict:
        out = {}
        for a, b, c in self.edges:
            out[a] = out[b] = c
        return out

    @cached_property
    def cilium_before(self) -> set:
        """Half-edges whose preceding corner carries a cilium."""
        return {self.vertices[v][pos] for v, pos in self.cilia if self.vertices[v]}

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_corners(self) -> int:
        """Uncilated corners, i.e. colour-0 edges of the coloured graph."""
        marked = {v for v, _ in self.cilia}
        return sum(len(c) - (v in marked) for v, c in enumerate(self.vertices) if c)

    def degree(self, v: int) -> int:
        return len(self.vertices[v])

    def ciliated(self, v: int) -> bool:
        return any(u == v for u, _ in self.cilia)

    @cached_property
    def n_components(self) -> int:
        vo = self.vertex_of
        return len(_components(self.n_vertices, [(vo[a], vo[b]) for a, b, _ in self.edges]))

    def neighbours(self, v: int):
        """(edge index, other vertex) for each half-edge at v, in rotation order."""
        vo = self.vertex_of
        index = {}
        for k, (a, b, _) in enumerate(self.edges):
            index[a] = index[b] = k
        return [(index[h], vo[self.alpha[h]]) for h in self.vertices[v]]

    def to_json(self) -> dict:
        return {
            "vertices": [list(c) for c in self.vertices],
            "edges": [list(e) for e in self.edges],
            "cilia": [list(c) for c in self.cilia],
        }

    @classmethod
    def from_json(cls, data: dict) -> "ColouredMap":
        try:
            return cls(data["vertices"], data.get("edges", []), data.get("cilia", []))
        except (KeyError, TypeError) as exc:
            raise MapError(f"malformed map JSON: {exc}") from exc


# ---------------------------------------------------------------------------
# the bijection
# ---------------------------------------------------------------------------

def to_if_map(g: ColouredGraph) -> ColouredMap:
    if g.n_vertices == 0:
        if g.rings and not g.external:
            return ColouredMap([()] * g.rings, [], [], D=g.D)
        raise GraphError("empty graph")
    inter = interactions(g)
    link_of = {}
    links = []
    edges = []
    for bubble in inter:
        hs = []
        for b, w in bubble.links:
            h = len(links)
            links.append((b, w))
            link_of[b] = link_of[w] = h
            hs.append(h)
        edges.append((hs[0], hs[1], bubble.colour))
    nbr = g.nbr

    def prev(h):
        u = nbr[links[h][1]][0]
        return None if u == EXT else link_of[u]

    def nxt(h):
        u = nbr[links[h][0]][0]
        return None if u == EXT else link_of[u]

    done = set()
    vertices, cilia = [], []
    for h0 in range(len(links)):
        if h0 in done:
            continue
        start = h0
        while True:
            p = prev(start)
            if p is None or p == h0:
                break
            start = p
        open_seq = prev(start) is None
        seq = [start]
        x = nxt(start)
        while x is not None and x != start:
            seq.append(x)
            x = nxt(x)
        done.update(seq)
        if open_seq:
            cilia.append((len(vertices), 0))
        vertices.append(tuple(seq))
    return ColouredMap(vertices, edges, cilia, D=g.D)


def from_if_map(m: ColouredMap) -> ColouredGraph:
    colours, zero = [], []
    black_of, white_of = {}, {}
    for k, (a, b, c) in enumerate(m.edges):
        colours.append(c)
        black_of[a], white_of[a] = 4 * k, 4 * k + 1
        black_of[b], white_of[b] = 4 * k + 2, 4 * k + 3
    cil = dict(m.cilia)
    rings = 0
    for v, cyc in enumerate(m.vertices):
        if not cyc:
            if v in cil:
                raise MapError("a ciliated bare vertex is a lone propagator, not a graph")
            rings += 1
            continue
        if v in cil:
            pos = cil[v]
            seq = cyc[pos:] + cyc[:pos]
            pairs = zip(seq[:-1], seq[1:])
        else:
            seq = cyc
            pairs = zip(seq, seq[1:] + seq[:1])
        for x, y in pairs:
            zero.append((black_of[x], white_of[y]))
    if not colours:
        return ColouredGraph((), (), (), D=m.D, rings=rings)
    g = model_graph(colours, zero, D=m.D)
    if rings:
        g = ColouredGraph(g.parity, g.edges, g.external, D=g.D, rings=rings)
    return g


# ---------------------------------------------------------------------------
# canonical form
# ---------------------------------------------------------------------------

def _rooted_map_code(m: ColouredMap, root: int) -> tuple:
    sig, alp, col, cb = m.sigma, m.alpha, m.colour_of, m.cilium_before
    label = {root: 0}
    queue = [root]
    code = []
    k = 0
    while k < len(queue):
        h = queue[k]
        k += 1
        code.append(col[h])
        code.append(h in cb)
        for u in (sig[h], alp[h]):
            if u not in label:
                label[u] = len(queue)
                queue.append(u)
            code.append(label[u])
    return tuple(code)


def map_code(m: ColouredMap) -> tuple:
    """Isomorphism invariant of a coloured map (rotations, colours, cilia)."""
    vo = m.vertex_of
    comps = _components(m.n_vertices, [(vo[a], vo[b]) for a, b, _ in m.edges])
    codes = []
    cil = dict(m.cilia)
    for comp in comps:
        hs = [h for v in comp for h in m.vertices[v]]
        if not hs:
            codes.append(("bare", comp[0] in cil))
        else:
            codes.append(min(_rooted_map_code(m, r) for r in hs))
    return tuple(sorted(codes, key=repr))


def maps_isomorphic(m1: ColouredMap, m2: ColouredMap) -> bool:
    return map_code(m1) == map_code(m2)


# ---------------------------------------------------------------------------
# structure and classification
# ---------------------------------------------------------------------------

def is_melonic_map(m: ColouredMap) -> bool:
    return m.n_components == 1 and m.n_edges == m.n_vertices - 1


def cycle_rank(m: ColouredMap) -> int:
    return m.n_edges - m.n_vertices + m.n_components


@dataclass(frozen=True)
class Chain:
    """Alternating edge / degree-2 vertex path; ``path`` = (e0, v1, e1, ..., ek)."""
    path: tuple
    broken: bool


def remove_vertex(m: ColouredMap, v: int) -> ColouredMap:
    """Delete a degree-1 vertex and its edge."""
    if m.degree(v) != 1:
        raise MapError("only degree-one vertices can be pruned")
    (h,) = m.vertices[v]
    h2 = m.alpha[h]
    u = m.vertex_of[h2]
    cil = dict(m.cilia)
    if v in cil:
        raise MapError("ciliated vertices are kept")
    new_vertices, new_cilia = [], []
    remap = {}
    for x, cyc in enumerate(m.vertices):
        if x == v:
            continue
        remap[x] = len(new_vertices)
        if x == u:
            j = cyc.index(h2)
            cyc = cyc[:j] + cyc[j + 1:]
            if x in cil:
                pos = cil[x]
                if j < pos:
                    pos -= 1
                cil[x] = pos % len(cyc) if cyc else 0
        new_vertices.append(cyc)
    for x, pos in cil.items():
        new_cilia.append((remap[x], pos))
    edges = [e for e in m.edges if h not in e[:2]]
    return ColouredMap(new_vertices, edges, new_cilia, D=m.D)


def reduce_chains(m: ColouredMap) -> ColouredMap:
    """Prune uncilated leaves recursively, never removing the last edge."""
    while m.n_edges > 1:
        leaves = [v for v in range(m.n_vertices) if m.degree(v) == 1 and not m.ciliated(v)]
        if not leaves:
            break
        m = remove_vertex(m, leaves[0])
    return m


def chains(m: ColouredMap) -> list:
    """Maximal chains: walks through degree-2 vertices between other vertices.

    A connected map that is a bare cycle yields a single closed chain.
    """
    edge_ends = {}
    for k, (a, b, _) in enumerate(m.edges):
        edge_ends[k] = (m.vertex_of[a], m.vertex_of[b])
    colours = [c for _, _, c in m.edges]
    used = set()
    out = []

    def walk(v, k):
        path = [k]
        used.add(k)
        x = edge_ends[k][1] if edge_ends[k][0] == v else edge_ends[k][0]
        while m.degree(x) == 2 and not m.ciliated(x) and x != v:
            nxt = [e for e, _ in m.neighbours(x) if e not in used]
            if not nxt:
                break
            path += [x, nxt[0]]
            used.add(nxt[0])
            k = nxt[0]
            x = edge_ends[k][1] if edge_ends[k][0] == x else edge_ends[k][0]
        return path

    for v in range(m.n_vertices):
        if m.degree(v) == 2 and not m.ciliated(v):
            continue
        for k, _ in m.neighbours(v):
            if k not in used:
                p = walk(v, k)
                out.append(Chain(tuple(p), len({colours[e] for e in p[::2]}) > 1))
    for k in range(m.n_edges):
        if k not in used:
            v = edge_ends[k][0]
            p = walk(v, k)
            out.append(Chain(tuple(p), len({colours[e] for e in p[::2]}) > 1))
    return out


def _path_colours(m: ColouredMap, src: int, dst: int):
    """Edge colours along the unique path between two vertices of a tree."""
    prev = {src: None}
    stack = [src]
    while stack:
        v = stack.pop()
        for k, u in m.neighbours(v):
            if u not in prev:
                prev[u] = (v, k)
                stack.append(u)
    if dst not in prev:
        return None
    cols = []
    x = dst
    while prev[x] is not None:
        v, k = prev[x]
        cols.append(m.edges[k][2])
        x = v
    return cols


def _face_walk(m: ColouredMap, colour: int):
    """Count closed colour-0/colour-i faces and trace external paths.

    Returns (number of closed faces, list of (start cilium, end cilium)) where
    every external path runs from the white leg of one cilium to the black
    leg of another.
    """
    sig, alp, col, cb = m.sigma, m.alpha, m.colour_of, m.cilium_before
    cil_at = {m.vertices[v][pos]: idx for idx, (v, pos) in enumerate(m.cilia) if m.vertices[v]}

    def step(h):
        x = alp[h] if col[h] == colour else h
        return x, sig[x]

    seen = set()
    paths = []
    for h0, idx in cil_at.items():
        h = h0
        while True:
            seen.add(h)
            x, y = step(h)
            if y in cb:
                paths.append((idx, cil_at[y]))
                break
            h = y
    faces = 0
    for h0 in m.sigma:
        if h0 in seen:
            continue
        h = h0
        while h not in seen:
            seen.add(h)
            h = step(h)[1]
        faces += 1
    return faces, paths


def map_power_counting(m: ColouredMap):
    """(E, C(dG), omega) evaluated from the map alone."""
    if any(not c for c in m.vertices) and m.cilia:
        for v, _ in m.cilia:
            if not m.vertices[v]:
                raise MapError("lone propagator")
    n_cil = len(m.cilia)
    F0 = 0
    bpairs = []
    for i in range(1, m.D + 1):
        f, paths = _face_walk(m, i)
        F0 += f
        bpairs += [(a, n_cil + b) for a, b in paths]
    # boundary vertices: white legs 0..n_cil-1, black legs n_cil..2n_cil-1
    c_boundary = len(_components(2 * n_cil, bpairs)) if n_cil else 0
    omega = -2 * m.n_corners + F0
    return 2 * n_cil, c_boundary, omega


def structural_family(m: ColouredMap) -> str:
    """Family from the shape of the map alone (trees, unicyclic maps, cilia)."""
    if m.n_components != 1:
        raise MapError("classification needs a connected map")
    n_cil = len(m.cilia)
    rank = cycle_rank(m)
    if rank == 0:
        if n_cil == 0:
            return "vacuum-melon"
        if n_cil == 1:
            return "two-point-melon"
        if n_cil == 2:
            (a, _), (b, _) = m.cilia
            cols = _path_colours(m, a, b)
            if len(set(cols)) == 1:
                return "four-point-melon"
        return "convergent"
    if rank == 1 and n_cil == 0:
        r = reduce_chains(m)
        cols = {c for _, _, c in r.edges}
        return "vacuum-necklace-monochrome" if len(cols) == 1 else "vacuum-necklace-mixed"
    return "convergent"


def classify_if(m: ColouredMap) -> DivergenceClass:
    """Divergence class computed on the map side.

    omega comes from counting corners and closed faces of the map, the
    degree then follows from 4 - E - (C(dG) - 1) - omega, and the family is
    read off the tree / cycle structure.
    """
    from fractions import Fraction

    E, cb, omega = map_power_counting(m)
    degree = Fraction(4 - E - (cb - 1) - omega)
    fam = structural_family(m)
    expected = family_tag(E, degree, omega)
    if fam != expected:
        raise MapError(f"map shape says {fam} but power counting says {expected}")
    return DivergenceClass(E, cb, degree, omega, fam)


def bare_vertex_map() -> ColouredMap:
    return ColouredMap([()], [], [])


def path_map(colours, cilia_at_ends: bool = True) -> ColouredMap:
    """A path of edges; with cilia on both end vertices it is a four-point tree."""
    k = len(colours)
    vertices = [[0]]
    for i in range(1, k):
        vertices.append([2 * i - 1, 2 * i])
    vertices.append([2 * k - 1])
    edges = [(2 * i, 2 * i + 1, c) for i, c in enumerate(colours)]
    cilia = [(0, 0), (k, 0)] if cilia_at_ends else []
    return ColouredMap(vertices, edges, cilia)


def cycle_map(colours) -> ColouredMap:
    k = len(colours)
    vertices = [[2 * i - 1 if i else 2 * k - 1, 2 * i] for i in range(k)]
    edges = [(2 * i, 2 * i + 1, c) for i, c in enumerate(colours)]
    return ColouredMap(vertices, edges, [])


__all__ = [
    "BLACK",
    "Chain",
    "ColouredMap",
    "MapError",
    "bare_vertex_map",
    "chains",
    "classify_if",
    "cycle_map",
    "cycle_rank",
    "from_if_map",
    "is_melonic_map",
    "map_code",
    "map_power_counting",
    "maps_isomorphic",
    "path_map",
    "reduce_chains",
    "structural_family",
    "to_if_map",
]
