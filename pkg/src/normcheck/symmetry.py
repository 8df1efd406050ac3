"""Isomorphisms, automorphism groups and edge orbits.

The search is individualisation/refinement: both graphs are coloured jointly
by iterated degree refinement, the first non-singleton cell is split by
individualising its lowest vertex in the source graph against every vertex of
the matching cell in the target (ascending), and the process recurses until
the colouring is discrete. Refining the pair jointly keeps colour ids
comparable across the two graphs, so a signature-count mismatch prunes the
branch immediately.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .graphs import Graph, connected_components, induced_subgraph

Mapping = tuple[int, ...]

DEFAULT_GROUP_CAP = 10**7


class GroupTooLarge(RuntimeError):
    """Automorphism enumeration exceeded the configured order cap."""

    def __init__(self, cap: int):
        self.cap = cap
        super().__init__(f"automorphism group too large (more than {cap} elements)")


def _refine(f: Graph, cf: list[int], g: Graph, cg: list[int]):
    ncolors = len(set(cf))
    while True:
        sf = [(cf[v], tuple(sorted(cf[w] for w in f.neighbors(v)))) for v in range(f.n)]
        sg = [(cg[v], tuple(sorted(cg[w] for w in g.neighbors(v)))) for v in range(g.n)]
        if Counter(sf) != Counter(sg):
            return None
        palette = {s: i for i, s in enumerate(sorted(set(sf)))}
        cf = [palette[s] for s in sf]
        cg = [palette[s] for s in sg]
        if len(palette) == ncolors:
            return cf, cg
        ncolors = len(palette)


def is_isomorphism(f: Graph, g: Graph, pi: Sequence[int]) -> bool:
    """Exhaustive check that ``pi`` is a bijection with uv in E(f) iff pi(u)pi(v) in E(g)."""
    if f.n != g.n or len(pi) != f.n or sorted(pi) != list(range(g.n)):
        return False
    for u in range(f.n):
        for v in range(u + 1, f.n):
            if f.has_edge(u, v) != g.has_edge(pi[u], pi[v]):
                return False
    return True


def _maps_edges(f: Graph, g: Graph, pi: Sequence[int]) -> bool:
    return f.k == g.k and all(g.has_edge(pi[u], pi[v]) for u, v in f.edges)


def iter_isomorphisms(
    f: Graph,
    g: Graph,
    f_colors: Optional[Sequence[int]] = None,
    g_colors: Optional[Sequence[int]] = None,
) -> Iterator[Mapping]:
    """Yield every isomorphism ``f -> g`` respecting the optional initial colourings.

    Order is deterministic. With ``f is g`` and no colouring the identity
    comes first.
    """
    if f.n != g.n or f.k != g.k or sorted(f.degrees()) != sorted(g.degrees()):
        return
    cf = list(f_colors) if f_colors is not None else [0] * f.n
    cg = list(g_colors) if g_colors is not None else [0] * g.n
    if Counter(cf) != Counter(cg):
        return
    yield from _search(f, cf, g, cg)


def _search(f: Graph, cf: list[int], g: Graph, cg: list[int]) -> Iterator[Mapping]:
    refined = _refine(f, cf, g, cg)
    if refined is None:
        return
    cf, cg = refined
    cells: dict[int, list[int]] = {}
    for v, c in enumerate(cf):
        cells.setdefault(c, []).append(v)
    target = next((c for c in sorted(cells) if len(cells[c]) > 1), None)
    if target is None:
        where = {c: w for w, c in enumerate(cg)}
        pi = tuple(where[cf[v]] for v in range(f.n))
        if _maps_edges(f, g, pi):
            yield pi
        return
    v = cells[target][0]
    fresh = f.n + 1
    for w in (u for u in range(g.n) if cg[u] == target):
        cf2 = list(cf)
        cg2 = list(cg)
        cf2[v] = fresh
        cg2[w] = fresh
        yield from _search(f, cf2, g, cg2)


def find_isomorphism(f: Graph, g: Graph) -> Optional[Mapping]:
    return next(iter_isomorphisms(f, g), None)


def automorphism_group(g: Graph, cap: int = DEFAULT_GROUP_CAP) -> list[Mapping]:
    """All automorphisms of ``g``, identity first. Raises GroupTooLarge past ``cap``."""
    group = []
    for pi in iter_isomorphisms(g, g):
        group.append(pi)
        if len(group) > cap:
            raise GroupTooLarge(cap)
    return group


def compose(p: Sequence[int], q: Sequence[int]) -> Mapping:
    """``p o q``: apply q first, then p."""
    return tuple(p[q[v]] for v in range(len(q)))


def invert(p: Sequence[int]) -> Mapping:
    inv = [0] * len(p)
    for v, w in enumerate(p):
        inv[w] = v
    return tuple(inv)


def edge_image(g: Graph, pi: Sequence[int], l: int) -> int:
    """Index of the edge that ``pi`` maps edge ``l`` onto (pi must be an automorphism)."""
    u, v = g.edges[l]
    a, b = pi[u], pi[v]
    return _edge_index(g)[(min(a, b), max(a, b))]


def _edge_index(g: Graph) -> dict[tuple[int, int], int]:
    return {e: i for i, e in enumerate(g.edges)}


@dataclass(frozen=True)
class EdgeOrbitPartition:
    """Edge orbits plus, per edge, an automorphism carrying its orbit's first edge onto it."""

    orbits: tuple[tuple[int, ...], ...]
    from_rep: dict[int, Mapping] = field(repr=False)
    method: str = "group"

    def orbit_of(self, l: int) -> tuple[int, ...]:
        return next(o for o in self.orbits if l in o)

    def witness(self, l1: int, l2: int) -> Mapping:
        """An automorphism mapping edge ``l1`` onto edge ``l2`` (same orbit required)."""
        if self.orbit_of(l1) != self.orbit_of(l2):
            raise ValueError(f"edges {l1} and {l2} lie in different orbits")
        return compose(self.from_rep[l2], invert(self.from_rep[l1]))


def edge_orbits(g: Graph, cap: int = DEFAULT_GROUP_CAP) -> EdgeOrbitPartition:
    """Orbit partition of edge indices under Aut(g).

    Uses the enumerated group; if that exceeds ``cap`` the orbits are found by
    pinned searches (one automorphism per representative/edge pair) instead.
    """
    try:
        group = automorphism_group(g, cap)
    except GroupTooLarge:
        return _edge_orbits_pinned(g)
    index = _edge_index(g)
    orbit_id = [-1] * g.k
    from_rep: dict[int, Mapping] = {}
    orbits = []
    for r in range(g.k):
        if orbit_id[r] != -1:
            continue
        members = []
        u, v = g.edges[r]
        for pi in group:
            a, b = pi[u], pi[v]
            l = index[(min(a, b), max(a, b))]
            if l not in from_rep:
                from_rep[l] = pi
                orbit_id[l] = len(orbits)
                members.append(l)
        orbits.append(tuple(sorted(members)))
    return EdgeOrbitPartition(tuple(orbits), from_rep)


def _pinned_automorphism(g: Graph, src: tuple[int, int], dst: tuple[int, int]) -> Optional[Mapping]:
    for a, b in ((dst[0], dst[1]), (dst[1], dst[0])):
        cf = [0] * g.n
        cg = [0] * g.n
        cf[src[0]], cf[src[1]] = 1, 2
        cg[a], cg[b] = 1, 2
        pi = next(iter_isomorphisms(g, g, cf, cg), None)
        if pi is not None:
            return pi
    return None


def _edge_orbits_pinned(g: Graph) -> EdgeOrbitPartition:
    ident = tuple(range(g.n))
    assigned = [False] * g.k
    from_rep: dict[int, Mapping] = {}
    orbits = []
    for r in range(g.k):
        if assigned[r]:
            continue
        assigned[r] = True
        from_rep[r] = ident
        members = [r]
        for l in range(r + 1, g.k):
            if assigned[l]:
                continue
            pi = _pinned_automorphism(g, g.edges[r], g.edges[l])
            if pi is not None:
                assigned[l] = True
                from_rep[l] = pi
                members.append(l)
        orbits.append(tuple(members))
    return EdgeOrbitPartition(tuple(orbits), from_rep, method="pinned")


def is_edge_transitive(g: Graph, cap: int = DEFAULT_GROUP_CAP) -> bool:
    """Single edge orbit. Edgeless graphs count as edge-transitive."""
    if g.k == 0:
        return True
    return len(edge_orbits(g, cap).orbits) == 1


@dataclass(frozen=True)
class ComponentCheck:
    """Result of comparing the non-singleton components of a graph.

    ``witnesses[i]`` maps vertices of ``components[0]`` onto vertices of
    ``components[i]`` (original labels), or is None where no isomorphism exists.
    """

    ok: bool
    components: tuple[frozenset[int], ...]
    singletons: tuple[int, ...]
    witnesses: tuple[Optional[dict[int, int]], ...]


def components_isomorphic(g: Graph) -> ComponentCheck:
    comps = connected_components(g)
    big = tuple(c for c in comps if len(c) > 1)
    singles = tuple(sorted(next(iter(c)) for c in comps if len(c) == 1))
    if not big:
        return ComponentCheck(True, big, singles, ())
    first = sorted(big[0])
    h0 = induced_subgraph(g, first)
    witnesses: list[Optional[dict[int, int]]] = [{v: v for v in first}]
    ok = True
    for comp in big[1:]:
        verts = sorted(comp)
        pi = find_isomorphism(h0, induced_subgraph(g, verts))
        if pi is None:
            ok = False
            witnesses.append(None)
        else:
            witnesses.append({first[i]: verts[pi[i]] for i in range(len(first))})
    return ComponentCheck(ok, big, singles, tuple(witnesses))
