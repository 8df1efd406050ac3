"""Homomorphism densities of graphs in step graphons.

Two independent routes:

* ``brute_force_*`` enumerates every map V -> blocks (the oracle);
* ``density`` / ``multilinear_density`` run bucket elimination along a greedy
  min-fill order, folding each vertex's block weights in at its own
  elimination step.

Isolated vertices are skipped by the contraction (their weights sum to one).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .graphon import ONE, StepGraphon, common_refinement, shift
from .graphs import Graph

BRUTE_FORCE_GUARD = 10**8
MEMORY_BUDGET = 2**28
_CHUNK = 1 << 18


class BruteForceRefused(RuntimeError):
    pass


class DensityBudgetExceeded(RuntimeError):
    def __init__(self, width: int, entries: int, budget: int):
        self.width = width
        self.entries = entries
        self.budget = budget
        super().__init__(
            f"contraction needs {entries} table entries (induced width {width}), budget {budget}"
        )


@dataclass(frozen=True)
class _Step:
    vertex: int
    operands: tuple[int, ...]  # factor ids consumed
    labels: tuple[tuple[int, ...], ...]  # einsum labels per operand
    out: tuple[int, ...]  # labels of the produced factor (vertex label excluded)
    scope: tuple[int, ...]  # graph vertices of the produced factor
    vlabel: int


@dataclass(frozen=True)
class ContractionPlan:
    order: tuple[int, ...]
    induced_width: int
    cost_estimate: int
    steps: tuple[_Step, ...] = field(repr=False)
    n_factors: int = field(repr=False)
    scalars: tuple[int, ...] = field(repr=False)  # factor ids left as scalars


@dataclass(frozen=True)
class DensityValue:
    value: float
    method: str  # "oracle" | "contraction"
    plan: Optional[ContractionPlan] = None

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True, eq=False)
class EdgeAssignment:
    """One kernel per edge, all re-expressed on a shared partition."""

    graph: Graph
    kernels: tuple[StepGraphon, ...]

    def __post_init__(self):
        if len(self.kernels) != self.graph.k:
            raise ValueError(f"need {self.graph.k} kernels, got {len(self.kernels)}")
        if self.kernels:
            object.__setattr__(self, "kernels", tuple(common_refinement(list(self.kernels))))

    @property
    def weights(self) -> np.ndarray:
        return self.kernels[0].weights if self.kernels else np.ones(1)

    def replace(self, l: int, h: StepGraphon) -> "EdgeAssignment":
        ks = list(self.kernels)
        ks[l] = h
        return EdgeAssignment(self.graph, tuple(ks))


def uniform_assignment(g: Graph, h: StepGraphon) -> EdgeAssignment:
    return EdgeAssignment(g, (h,) * g.k)


# -- oracle ---------------------------------------------------------------


def _brute(g: Graph, mats: Sequence[np.ndarray], w: np.ndarray, guard: int) -> float:
    n, q = g.n, w.size
    total = q**n
    if total > guard:
        raise BruteForceRefused(f"q^n = {q}^{n} exceeds brute-force guard {guard}")
    if n == 0:
        return 1.0
    powers = q ** np.arange(n, dtype=np.int64)
    sums = []
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        phi = (idx[None, :] // powers[:, None]) % q  # phi[v] = block of vertex v
        term = np.ones(idx.size)
        for v in range(n):
            term *= w[phi[v]]
        for (i, j), m in zip(g.edges, mats):
            term *= m[phi[i], phi[j]]
        sums.append(math.fsum(term))
    return math.fsum(sums)


def brute_force_density(g: Graph, h: StepGraphon, guard: int = BRUTE_FORCE_GUARD) -> DensityValue:
    """Sum over all q^n block maps; refuses when q^n exceeds ``guard``."""
    return DensityValue(_brute(g, [h.values] * g.k, h.weights, guard), "oracle")


def brute_force_multilinear(a: EdgeAssignment, guard: int = BRUTE_FORCE_GUARD) -> DensityValue:
    mats = [h.values for h in a.kernels]
    return DensityValue(_brute(a.graph, mats, a.weights, guard), "oracle")


# -- planning -------------------------------------------------------------


def _min_fill_order(g: Graph) -> tuple[list[int], list[tuple[int, ...]]]:
    adj = {v: set(g.neighbors(v)) for v in range(g.n)}
    order, nbrs_at = [], []
    while adj:
        best = None
        for v in sorted(adj):
            nb = adj[v]
            fill = sum(1 for a in nb for b in nb if a < b and b not in adj[a])
            key = (fill, len(nb), v)
            if best is None or key < best:
                best = key
        v = best[2]
        nb = adj.pop(v)
        for a in nb:
            adj[a].discard(v)
            adj[a] |= nb - {a}
        order.append(v)
        nbrs_at.append(tuple(sorted(nb)))
    return order, nbrs_at


def induced_width_of(g: Graph, order: Sequence[int]) -> int:
    """Width of an arbitrary elimination order, recomputed from scratch."""
    adj = {v: set(g.neighbors(v)) for v in range(g.n)}
    width = 0
    for v in order:
        nb = adj.pop(v)
        width = max(width, len(nb))
        for a in nb:
            adj[a].discard(v)
            adj[a] |= nb - {a}
    return width


@lru_cache(maxsize=256)
def plan_contraction(g: Graph, q: int = 2) -> ContractionPlan:
    """Greedy min-fill order (ties: min degree, then lowest index), compiled to einsum steps."""
    order, _ = _min_fill_order(g)
    scopes: dict[int, tuple[int, ...]] = {l: e for l, e in enumerate(g.edges)}
    alive = dict(scopes)
    next_id = g.k
    steps = []
    width = 0
    cost = 0
    for v in order:
        ops = [fid for fid, sc in alive.items() if v in sc]
        if not ops:
            continue
        scope = tuple(sorted({u for fid in ops for u in alive[fid]} - {v}))
        local = {u: i for i, u in enumerate(scope)}
        local[v] = len(scope)
        steps.append(
            _Step(
                vertex=v,
                operands=tuple(ops),
                labels=tuple(tuple(local[u] for u in alive[fid]) for fid in ops),
                out=tuple(range(len(scope))),
                scope=scope,
                vlabel=len(scope),
            )
        )
        width = max(width, len(scope))
        cost += q ** (len(scope) + 1) * (len(ops) + 1)
        for fid in ops:
            del alive[fid]
        alive[next_id] = scope
        next_id += 1
    scalars = tuple(fid for fid, sc in alive.items() if not sc)
    return ContractionPlan(tuple(order), width, cost, tuple(steps), next_id, scalars)


def _check_budget(plan: ContractionPlan, q: int, budget: int) -> None:
    entries = q ** (plan.induced_width + 1)
    if entries > budget:
        raise DensityBudgetExceeded(plan.induced_width, entries, budget)


def _kahan_last_axis(a: np.ndarray) -> np.ndarray:
    s = a[..., 0].copy()
    c = np.zeros_like(s)
    for i in range(1, a.shape[-1]):
        y = a[..., i] - c
        t = s + y
        c = (t - s) - y
        s = t
    return s


def _forward(plan: ContractionPlan, mats: Sequence[np.ndarray], w: np.ndarray, keep: bool = False):
    factors: list[Optional[np.ndarray]] = list(mats) + [None] * (plan.n_factors - len(mats))
    saved = []
    for s, step in enumerate(plan.steps):
        args = []
        for fid, lab in zip(step.operands, step.labels):
            args += [factors[fid], list(lab)]
        args += [w, [step.vlabel]]
        prod = np.einsum(*args, list(step.out) + [step.vlabel])
        factors[len(mats) + s] = _kahan_last_axis(prod)
        if keep:
            saved.append([factors[fid] for fid in step.operands])
        else:
            for fid in step.operands:
                factors[fid] = None
    vals = [float(factors[fid]) for fid in plan.scalars]
    return vals, factors, saved


def _contract(plan: ContractionPlan, mats: Sequence[np.ndarray], w: np.ndarray) -> float:
    vals, _, _ = _forward(plan, mats, w)
    return math.prod(vals)


def density(g: Graph, h: StepGraphon, memory_budget: int = MEMORY_BUDGET) -> DensityValue:
    plan = plan_contraction(g, h.q)
    _check_budget(plan, h.q, memory_budget)
    return DensityValue(_contract(plan, [h.values] * g.k, h.weights), "contraction", plan)


def multilinear_density(a: EdgeAssignment, memory_budget: int = MEMORY_BUDGET) -> DensityValue:
    q = a.weights.size
    plan = plan_contraction(a.graph, q)
    _check_budget(plan, q, memory_budget)
    mats = [h.values for h in a.kernels]
    return DensityValue(_contract(plan, mats, a.weights), "contraction", plan)


def multilinear_gradient(
    g: Graph, mats: Sequence[np.ndarray], w: np.ndarray, memory_budget: int = MEMORY_BUDGET
) -> tuple[float, list[np.ndarray]]:
    """Value of t_G(h_1..h_k) and d t / d H_l[a, b] for every edge factor.

    Reverse pass over the same elimination; since t is linear in each H_l,
    ``sum(grad[l] * K)`` is the density with kernel K substituted at slot l.
    """
    q = w.size
    plan = plan_contraction(g, q)
    _check_budget(plan, q, memory_budget)
    vals, factors, saved = _forward(plan, mats, w, keep=True)
    value = math.prod(vals)
    grads: list[Optional[np.ndarray]] = [None] * plan.n_factors
    for i, fid in enumerate(plan.scalars):
        grads[fid] = np.asarray(math.prod(vals[:i] + vals[i + 1 :]))
    base = len(mats)
    for s in range(len(plan.steps) - 1, -1, -1):
        step = plan.steps[s]
        gout = grads[base + s]
        ops = saved[s]
        for j, (fid, lab) in enumerate(zip(step.operands, step.labels)):
            args = [gout, list(step.out), w, [step.vlabel]]
            for m, (arr, lab2) in enumerate(zip(ops, step.labels)):
                if m != j:
                    args += [arr, list(lab2)]
            grads[fid] = np.einsum(*args, list(lab))
    out = []
    for l in range(len(mats)):
        gl = grads[l]
        out.append(np.zeros((q, q)) if gl is None else gl)
    return value, out


# -- lemma quantities -----------------------------------------------------


def edge_deleted_densities(g: Graph, h: StepGraphon, memory_budget: int = MEMORY_BUDGET) -> list[float]:
    """t_l = t_G(h, .., h, 1 at slot l, h, .., h) for every edge l."""
    one = np.ones((h.q, h.q))
    plan = plan_contraction(g, h.q)
    _check_budget(plan, h.q, memory_budget)
    out = []
    for l in range(g.k):
        mats = [h.values] * g.k
        mats[l] = one
        out.append(_contract(plan, mats, h.weights))
    return out


def edge_deleted_densities_fast(g: Graph, h: StepGraphon, memory_budget: int = MEMORY_BUDGET) -> list[float]:
    """Same values as :func:`edge_deleted_densities` from a single reverse pass."""
    if g.k == 0:
        return []
    _, grads = multilinear_gradient(g, [h.values] * g.k, h.weights, memory_budget)
    return [math.fsum(gr.ravel()) for gr in grads]


def uniform_direction_derivative(g: Graph, h: StepGraphon) -> float:
    """d/de t_G(h + e) at e = 0, i.e. the sum of the edge-deleted densities."""
    return math.fsum(edge_deleted_densities(g, h))


def perturbed_pair_density(g: Graph, h: StepGraphon, eps: float, l1: int, l2: int) -> float:
    """t_G with h + eps at slot l1, h - eps at slot l2 and h elsewhere."""
    if l1 == l2:
        raise ValueError("perturbed slots must differ")
    if not (0 <= l1 < g.k and 0 <= l2 < g.k):
        raise IndexError("edge index out of range")
    ks = [h] * g.k
    ks[l1] = shift(h, eps)
    ks[l2] = shift(h, -eps)
    return multilinear_density(EdgeAssignment(g, tuple(ks))).value


def one_padded(g: Graph, slot: int, h: StepGraphon) -> EdgeAssignment:
    ks = [ONE] * g.k
    ks[slot] = h
    return EdgeAssignment(g, tuple(ks))
