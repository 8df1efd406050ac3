"""Named graph families used as fixtures and CLI shortcuts.

Names: ``P<n>``, ``C<n>``, ``K<n>``, ``K_<a>_<b>``, ``star_<n>``, ``Q<d>``,
``torus_<m>_<n>``, and disjoint unions joined with ``+`` (``C4+C6``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations

from .graphs import Graph, disjoint_union

KNOWN_WN = "known_weakly_norming"
KNOWN_NOT_WN = "known_not_weakly_norming"
UNKNOWN = "unknown"


def path(n: int) -> Graph:
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)))


def cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle needs at least 3 vertices")
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)) + ((0, n - 1),))


def complete(n: int) -> Graph:
    return Graph(n, tuple(combinations(range(n), 2)))


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph(a + b, tuple((i, a + j) for i in range(a) for j in range(b)))


def star(n: int) -> Graph:
    """K_{1,n} with centre 0."""
    return complete_bipartite(1, n)


def hypercube(d: int) -> Graph:
    n = 1 << d
    return Graph(n, tuple((v, v | (1 << i)) for v in range(n) for i in range(d) if not v & (1 << i)))


def torus(m: int, n: int) -> Graph:
    """Cartesian product C_m x C_n; vertex (r, c) is r*n + c."""
    edges = set()
    for r in range(m):
        for c in range(n):
            v = r * n + c
            for w in (r * n + (c + 1) % n, ((r + 1) % m) * n + c):
                edges.add((min(v, w), max(v, w)))
    return Graph(m * n, tuple(sorted(edges)))


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    graph: Graph
    known_status: str = UNKNOWN
    note: str = ""


_STATUS = {
    "C4": (KNOWN_WN, "even cycles are norming (Hatami 2010)"),
    "C6": (KNOWN_WN, "even cycles are norming (Hatami 2010)"),
    "K_2_2": (KNOWN_WN, "complete bipartite graphs are weakly norming (Hatami 2010)"),
    "K_2_3": (KNOWN_WN, "complete bipartite graphs are weakly norming (Hatami 2010)"),
    "K_3_3": (KNOWN_WN, "complete bipartite graphs are weakly norming (Hatami 2010)"),
    "Q3": (KNOWN_WN, "hypercubes are weakly norming (Hatami 2010)"),
    "star_1": (KNOWN_WN, "stars are weakly norming (Hatami 2010)"),
    "star_2": (KNOWN_WN, "stars are weakly norming (Hatami 2010)"),
    "star_3": (KNOWN_WN, "stars are weakly norming (Hatami 2010)"),
    "star_4": (KNOWN_WN, "stars are weakly norming (Hatami 2010)"),
    "P4": (KNOWN_NOT_WN, "not biregular; not edge-transitive"),
    "K3": (KNOWN_NOT_WN, "not bipartite"),
    "C5": (KNOWN_NOT_WN, "not bipartite"),
    "torus_4_4": (KNOWN_WN, "C4 x C4 is the hypercube Q4 (Hatami 2010)"),
    "torus_6_6": (
        KNOWN_NOT_WN,
        "toroidal grids C_2k x C_2k with k >= 3 are not weakly norming (Kral' et al. 2019)",
    ),
}

LISTED = tuple(_STATUS)

_PATTERNS = [
    (re.compile(r"P(\d+)"), lambda m: path(int(m[1]))),
    (re.compile(r"C(\d+)"), lambda m: cycle(int(m[1]))),
    (re.compile(r"K(\d+)"), lambda m: complete(int(m[1]))),
    (re.compile(r"K_(\d+)_(\d+)"), lambda m: complete_bipartite(int(m[1]), int(m[2]))),
    (re.compile(r"star_(\d+)"), lambda m: star(int(m[1]))),
    (re.compile(r"Q(\d+)"), lambda m: hypercube(int(m[1]))),
    (re.compile(r"torus_(\d+)_(\d+)"), lambda m: torus(int(m[1]), int(m[2]))),
]


def build(name: str) -> Graph:
    """Construct a catalog graph by name; raises KeyError for unknown names."""
    parts = name.split("+")
    if len(parts) > 1:
        return disjoint_union(*(build(p) for p in parts))
    for pat, make in _PATTERNS:
        m = pat.fullmatch(name)
        if m:
            return make(m)
    raise KeyError(f"unknown catalog name {name!r}")


def entry(name: str) -> CatalogEntry:
    status, note = _STATUS.get(name, (UNKNOWN, ""))
    return CatalogEntry(name, build(name), status, note)


def listing() -> list[CatalogEntry]:
    return [entry(name) for name in LISTED]
