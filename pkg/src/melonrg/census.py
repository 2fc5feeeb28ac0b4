"""Exhaustive generation of connected model graphs up to isomorphism.

Graphs are grown from a single bubble by two moves: attach a fresh bubble
through one colour-0 edge, or join two free legs.  Every connected graph is
reached (grow a spanning tree of bubbles first, then close edges) and
isomorphic states are merged through a canonical code, so each class is
visited once.  Bubble colours follow a restricted-growth rule (a new bubble
uses a colour already present or the next unused one); this picks at least
one representative per class up to relabelling of colours 1..5.

The compact state is ``(colours, zero)`` where bubble k owns vertices
``4k..4k+3`` = (b1, w1, b2, w2) and ``zero[v]`` is the colour-0 neighbour
of v or -1 for a free leg.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .graphs import (
    WHITE,
    ColouredGraph,
    boundary_colour,
    boundary_components,
    canonical_code,
    divergence_degree,
    is_one_particle_irreducible,
    model_graph,
    recolour,
)

FREE = -1


def _partner(v):
    return v ^ 1


def _cross(v):
    return (v & ~3) | (3 - (v & 3))


def _code_from(colours, zero, root, rename=False):
    label = {root: 0}
    queue = [root]
    code = []
    names = {}
    k = 0
    while k < len(queue):
        v = queue[k]
        k += 1
        c = colours[v >> 2]
        if rename:
            c = names.setdefault(c, len(names) + 1)
        code.append(c)
        for u in (zero[v], _partner(v), _cross(v)):
            if u == FREE:
                code.append(-1)
                continue
            lab = label.get(u)
            if lab is None:
                lab = label[u] = len(queue)
                queue.append(u)
            code.append(lab)
    return tuple(code)


def state_code(colours, zero, up_to_colours=False):
    """Canonical code of a connected compact state.

    With ``up_to_colours`` colours are renamed by first appearance along the
    BFS (whose order never looks at colour labels), giving a complete
    invariant up to permutations of colours 1..D.
    """
    # the code starts (colour, zero-label); restrict roots to the minimal prefix
    best_key = None
    roots = []
    for v in range(0, len(zero), 2):
        key = (1 if up_to_colours else colours[v >> 2], -1 if zero[v] == FREE else 1)
        if best_key is None or key < best_key:
            best_key, roots = key, [v]
        elif key == best_key:
            roots.append(v)
    return min(_code_from(colours, zero, r, up_to_colours) for r in roots)


def rooted_state_code(colours, zero, root):
    return _code_from(colours, zero, root)


@dataclass(frozen=True)
class CensusEntry:
    colours: tuple
    zero: tuple

    @property
    def order(self) -> int:
        return len(self.colours)

    @property
    def n_external(self) -> int:
        return sum(1 for z in self.zero if z == FREE)

    def graph(self) -> ColouredGraph:
        pairs = [(v, u) for v, u in enumerate(self.zero) if u != FREE and v < u]
        return model_graph(self.colours, pairs)


def path_end(zero, w):
    """Black leg ending the alternating partner-link / colour-0 path from white leg w."""
    x = w
    while True:
        b = _partner(x)
        if zero[b] == FREE:
            return b
        x = zero[b]


def _children(colours, zero, max_order, D, melonic=False):
    free = [v for v, z in enumerate(zero) if z == FREE]
    blacks = [v for v in free if not v & 1]
    whites = [v for v in free if v & 1]
    if melonic:
        joins = [(path_end(zero, w), w) for w in whites]
    else:
        joins = [(b, w) for b in blacks for w in whites]
    for b, w in joins:
        nz = list(zero)
        nz[b], nz[w] = w, b
        yield colours, tuple(nz)
    if len(colours) < max_order:
        k = len(colours)
        top = min(max(colours) + 1, D)
        for c in range(1, top + 1):
            ncol = colours + (c,)
            for x in free:
                nz = list(zero) + [FREE] * 4
                y = 4 * k + (1 if not x & 1 else 0)
                nz[x], nz[y] = y, x
                yield ncol, tuple(nz)


def generate(max_order: int, D: int = 5, keep=None, up_to_colours: bool = True,
             melonic: bool = False) -> list:
    """All connected model graphs with 1..max_order bubbles, one per class.

    ``melonic=True`` restricts joins to closing an open alternating path on
    itself; the other joins raise the degree, and the degree never drops
    along either move, so this visits exactly the degree-0 graphs.

    ``keep(colours, zero)`` may prune states; it must be monotone (a
    rejected state has no accepted descendant) for the result to stay
    exhaustive over accepted graphs.
    """
    start = ((1,), (FREE,) * 4)
    seen = {state_code(*start, up_to_colours)}
    frontier = [start]
    out = []
    while frontier:
        nxt = []
        for colours, zero in frontier:
            if keep is not None and not keep(colours, zero):
                continue
            out.append(CensusEntry(colours, zero))
            for child in _children(colours, zero, max_order, D, melonic):
                code = state_code(*child, up_to_colours)
                if code not in seen:
                    seen.add(code)
                    nxt.append(child)
        frontier = nxt
    out.sort(key=lambda e: (e.order, -e.n_external, state_code(e.colours, e.zero)))
    return out


def random_gluing(order: int, rng: random.Random, D: int = 5, connected: bool = True):
    """A uniformly random perfect-or-partial gluing of ``order`` random bubbles."""
    while True:
        colours = tuple(rng.randint(1, D) for _ in range(order))
        blacks = [v for v in range(4 * order) if not v & 1]
        whites = [v for v in range(4 * order) if v & 1]
        rng.shuffle(blacks)
        rng.shuffle(whites)
        n_int = rng.randint(0, 2 * order)
        pairs = list(zip(blacks[:n_int], whites[:n_int]))
        g = model_graph(colours, pairs, D)
        if not connected or g.n_components == 1:
            return g


def _colour_variants(g: ColouredGraph, D: int = 5):
    for perm in itertools.permutations(range(1, D + 1)):
        yield recolour(g, dict(zip(range(1, D + 1), perm)))


def gamma4_census(max_order: int, colour: int = 1, D: int = 5) -> dict:
    """Count divergent 1PI four-point graphs of each order.

    Graphs are counted with colour-exact isomorphism, boundary colour
    ``colour`` and one marked white external leg (the two external
    partner pairs are distinguishable).  Divergence is checked through the
    jacket degree; 1PI means no colour-0 bridge.
    """
    counts = {n: 0 for n in range(1, max_order + 1)}
    for entry in generate(max_order, D, melonic=True):
        if entry.n_external != 4:
            continue
        g = entry.graph()
        if boundary_components(g) != 1 or not is_one_particle_irreducible(g):
            continue
        if divergence_degree(g) != 0:
            continue
        codes = set()
        for h in _colour_variants(g, D):
            if boundary_colour(h) != colour:
                continue
            for v, _ in h.external:
                if h.parity[v] == WHITE:
                    codes.add(canonical_code(h, root=v))
        counts[entry.order] += len(codes)
    return counts
