"""Finite simple graphs: construction, graph6 / edge-list I/O, and basic structure."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence


class GraphFormatError(ValueError):
    """Malformed graph input. ``offset`` is the byte offset of the problem."""

    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at byte {offset})"
        super().__init__(message)


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices ``0..n-1``.

    ``edges`` is an ordered tuple of pairs ``(i, j)`` with ``i < j``; the
    position of a pair in the tuple is its edge index.
    """

    n: int
    edges: tuple[tuple[int, int], ...] = ()
    _adj: tuple[frozenset[int], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be nonnegative")
        norm = []
        seen = set()
        for e in self.edges:
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if u > v:
                u, v = v, u
            if u < 0 or v >= self.n:
                raise ValueError(f"edge {(u, v)} out of range for n={self.n}")
            if (u, v) in seen:
                raise ValueError(f"duplicate edge {(u, v)}")
            seen.add((u, v))
            norm.append((u, v))
        object.__setattr__(self, "edges", tuple(norm))
        adj: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in norm:
            adj[u].add(v)
            adj[v].add(u)
        object.__setattr__(self, "_adj", tuple(frozenset(a) for a in adj))

    @property
    def k(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> frozenset[int]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def degrees(self) -> list[int]:
        return [len(a) for a in self._adj]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def edge_set(self) -> frozenset[frozenset[int]]:
        return frozenset(frozenset(e) for e in self.edges)

    def __str__(self) -> str:
        return f"Graph(n={self.n}, k={self.k})"


@dataclass(frozen=True)
class Bipartition:
    part_a: frozenset[int]
    part_b: frozenset[int]
    degree_a: Optional[int]
    degree_b: Optional[int]


# -- graph6 -----------------------------------------------------------------

_G6_HEADER = ">>graph6<<"
_GS6_HEADER_PREFIXES = (":", "&", ">>sparse6<<", ">>digraph6<<")


def _decode_n(data: bytes, base: int) -> tuple[int, int]:
    """Return (n, bytes consumed) for the size field of a graph6 string."""
    if not data:
        raise GraphFormatError("empty graph6 string", base)

    def chunk(start: int, count: int) -> int:
        if len(data) < start + count:
            raise GraphFormatError("truncated size field", base + len(data))
        val = 0
        for off in range(start, start + count):
            c = data[off]
            if not 63 <= c <= 126:
                raise GraphFormatError(f"character {chr(c)!r} out of range", base + off)
            val = (val << 6) | (c - 63)
        return val

    if data[0] != 126:
        return chunk(0, 1), 1
    if len(data) > 1 and data[1] == 126:
        return chunk(2, 6), 8
    return chunk(1, 3), 4


def parse_graph6(text: str) -> Graph:
    """Decode one graph6 line. Edges come out in row-major ``(i < j)`` order."""
    line = text.strip()
    base = 0
    if line.startswith(_GS6_HEADER_PREFIXES):
        raise GraphFormatError("sparse6/digraph6 input is not graph6", 0)
    if line.startswith(_G6_HEADER):
        base = len(_G6_HEADER)
        line = line[base:]
    try:
        data = line.encode("ascii")
    except UnicodeEncodeError as exc:
        raise GraphFormatError("non-ASCII character", base + exc.start) from None
    n, used = _decode_n(data, base)
    nbits = n * (n - 1) // 2
    need = (nbits + 5) // 6
    body = data[used:]
    if len(body) < need:
        raise GraphFormatError(
            f"truncated bit vector: expected {need} bytes, got {len(body)}",
            base + len(data),
        )
    if len(body) > need:
        raise GraphFormatError("trailing bytes after bit vector", base + used + need)
    bits = []
    for off, c in enumerate(body):
        if not 63 <= c <= 126:
            raise GraphFormatError(f"character {chr(c)!r} out of range", base + used + off)
        v = c - 63
        bits.extend((v >> s) & 1 for s in range(5, -1, -1))
    edges = []
    pos = 0
    for j in range(1, n):
        for i in range(j):
            if bits[pos]:
                edges.append((i, j))
            pos += 1
    edges.sort()
    return Graph(n, tuple(edges))


def to_graph6(g: Graph) -> str:
    n = g.n
    if n <= 62:
        out = [n + 63]
    elif n <= 258047:
        out = [126] + [((n >> s) & 63) + 63 for s in (12, 6, 0)]
    else:
        out = [126, 126] + [((n >> s) & 63) + 63 for s in (30, 24, 18, 12, 6, 0)]
    bits = [1 if g.has_edge(i, j) else 0 for j in range(1, n) for i in range(j)]
    bits += [0] * (-len(bits) % 6)
    for p in range(0, len(bits), 6):
        v = 0
        for b in bits[p : p + 6]:
            v = (v << 1) | b
        out.append(v + 63)
    return bytes(out).decode("ascii")


# -- edge-list text ---------------------------------------------------------


def parse_edge_list(text: str, n: int | None = None) -> Graph:
    """Parse ``u v`` lines ('#' starts a comment).

    A line ``n <count>`` fixes the vertex count; otherwise it is one more than
    the largest vertex mentioned.
    """
    pairs = []
    declared = n
    offset = 0
    for line in text.splitlines(keepends=True):
        body = line.split("#", 1)[0].strip()
        if body:
            toks = body.split()
            if toks[0] == "n" and len(toks) == 2:
                try:
                    declared = int(toks[1])
                except ValueError:
                    raise GraphFormatError(f"bad vertex count {toks[1]!r}", offset) from None
            elif len(toks) == 2:
                try:
                    u, v = int(toks[0]), int(toks[1])
                except ValueError:
                    raise GraphFormatError(f"bad edge line {body!r}", offset) from None
                if u < 0 or v < 0:
                    raise GraphFormatError("negative vertex index", offset)
                pairs.append((u, v, offset))
            else:
                raise GraphFormatError(f"expected 'u v', got {body!r}", offset)
        offset += len(line.encode("utf-8"))
    top = max((max(u, v) for u, v, _ in pairs), default=-1) + 1
    count = declared if declared is not None else top
    if count < top:
        raise GraphFormatError(f"vertex index {top - 1} exceeds declared n={count}")
    seen = set()
    edges = []
    for u, v, off in pairs:
        if u == v:
            raise GraphFormatError(f"self-loop at vertex {u}", off)
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphFormatError(f"duplicate edge {key}", off)
        seen.add(key)
        edges.append(key)
    return Graph(count, tuple(edges))


def to_edge_list(g: Graph) -> str:
    lines = [f"n {g.n}"] + [f"{u} {v}" for u, v in g.edges]
    return "\n".join(lines) + "\n"


# -- structure --------------------------------------------------------------


def delete_edge(g: Graph, l: int) -> Graph:
    """Drop edge ``l`` (0-based); remaining edges keep their relative order."""
    if not 0 <= l < g.k:
        raise IndexError(f"edge index {l} out of range for k={g.k}")
    return Graph(g.n, g.edges[:l] + g.edges[l + 1 :])


def add_edge(g: Graph, u: int, v: int) -> Graph:
    return Graph(g.n, g.edges + ((u, v),))


def relabel(g: Graph, perm: Sequence[int]) -> Graph:
    """Image of ``g`` under the vertex map ``v -> perm[v]`` (edge order kept)."""
    return Graph(g.n, tuple((perm[u], perm[v]) for u, v in g.edges))


def disjoint_union(*graphs: Graph) -> Graph:
    edges = []
    shift = 0
    for h in graphs:
        edges.extend((u + shift, v + shift) for u, v in h.edges)
        shift += h.n
    return Graph(shift, tuple(edges))


def induced_subgraph(g: Graph, vertices: Iterable[int]) -> Graph:
    """Subgraph induced on ``vertices``, relabelled ``0..m-1`` in ascending order."""
    vs = sorted(vertices)
    index = {v: i for i, v in enumerate(vs)}
    edges = tuple((index[u], index[v]) for u, v in g.edges if u in index and v in index)
    return Graph(len(vs), edges)


def connected_components(g: Graph) -> list[frozenset[int]]:
    """Components ordered by smallest vertex; singletons are size-1 sets."""
    seen = [False] * g.n
    comps = []
    for s in range(g.n):
        if seen[s]:
            continue
        seen[s] = True
        comp = [s]
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in g.neighbors(u):
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    queue.append(w)
        comps.append(frozenset(comp))
    return comps


def is_connected(g: Graph) -> bool:
    return len(connected_components(g)) <= 1


def _two_color(g: Graph) -> tuple[list[int], Optional[list[int]]]:
    """BFS 2-colouring anchored at each component's smallest vertex.

    Returns (colours, odd_cycle); odd_cycle is a closed walk of odd length
    when the colouring fails.
    """
    color = [-1] * g.n
    parent = [-1] * g.n
    for s in range(g.n):
        if color[s] != -1:
            continue
        color[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in sorted(g.neighbors(u)):
                if color[w] == -1:
                    color[w] = 1 - color[u]
                    parent[w] = u
                    queue.append(w)
                elif color[w] == color[u]:
                    return color, _odd_cycle(parent, u, w)
    return color, None


def _odd_cycle(parent: list[int], u: int, w: int) -> list[int]:
    def chain(x):
        out = [x]
        while parent[x] != -1:
            x = parent[x]
            out.append(x)
        return out

    pu, pw = chain(u), chain(w)
    common = set(pu) & set(pw)
    # lowest common ancestor
    top_u = next(i for i, x in enumerate(pu) if x in common)
    lca = pu[top_u]
    top_w = pw.index(lca)
    return pu[: top_u + 1] + list(reversed(pw[:top_w]))


def odd_cycle(g: Graph) -> Optional[list[int]]:
    """An odd cycle ``[v0, v1, ..., v_{m-1}]`` (closing edge v_{m-1}v0), or None."""
    return _two_color(g)[1]


def is_bipartite(g: Graph) -> Optional[Bipartition]:
    color, cycle = _two_color(g)
    if cycle is not None:
        return None
    a = frozenset(v for v in range(g.n) if color[v] == 0)
    b = frozenset(v for v in range(g.n) if color[v] == 1)
    return Bipartition(a, b, _common_degree(g, a), _common_degree(g, b))


def _common_degree(g: Graph, part: Iterable[int]) -> Optional[int]:
    degs = {g.degree(v) for v in part}
    return degs.pop() if len(degs) == 1 else None


def part_degrees(g: Graph, bip: Bipartition) -> Optional[tuple[int, int]]:
    """Common part degrees ``(a, b)`` with ``a <= b``, or None if not biregular."""
    da, db = _common_degree(g, bip.part_a), _common_degree(g, bip.part_b)
    if da is None or db is None:
        return None
    return (da, db) if da <= db else (db, da)


def without_isolated(g: Graph) -> Graph:
    return induced_subgraph(g, [v for v in range(g.n) if g.degree(v) > 0])


def erdos_renyi(n: int, p: float, rng) -> Graph:
    """G(n, p) sample drawn from a numpy Generator."""
    edges = [(i, j) for j in range(n) for i in range(j) if rng.random() < p]
    edges.sort()
    return Graph(n, tuple(edges))
