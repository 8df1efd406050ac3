"""Necessary conditions for weak norming, certificate searches and proof traces."""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import partial
from typing import Callable, Optional, Sequence

import numpy as np

from . import catalog
from .density import (
    EdgeAssignment,
    density,
    edge_deleted_densities,
    edge_deleted_densities_fast,
    multilinear_density,
    multilinear_gradient,
)
from .graphon import StepGraphon, _random_from, random_graphon
from .graphs import (
    Graph,
    delete_edge,
    induced_subgraph,
    is_bipartite,
    is_connected,
    odd_cycle,
    part_degrees,
    to_graph6,
)
from .symmetry import (
    components_isomorphic,
    edge_orbits,
    is_isomorphism,
    iter_isomorphisms,
)

VIOLATION_TOL = 1e-6
EQUALITY_RTOL = 1e-10
_MIN_GAIN = 1e-12  # improvements below this are rounding noise
HOLDER_TOL = 1e-9
NOT_WN = "NotWeaklyNorming"
PASSES = "PassesAllNecessaryConditions"

INSUFFICIENCY_CAVEAT = (
    "Passing every check is not sufficient for weak norming: toroidal grids "
    "C_2k x C_2k with k >= 3 are bipartite, regular and edge-transitive, yet are "
    "known not to be weakly norming (Kral' et al. 2019)."
)
INCONCLUSIVE = "no certificate found within budget (inconclusive, not a proof)"


class DomainError(ValueError):
    """A kernel outside the nonnegative class was passed where one is required."""


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class SearchBudget:
    restarts: int = 50
    steps: int = 500
    q_values: tuple[int, ...] = (2, 3)
    value_cap: float = 4.0
    seed: int = 0
    tolerance: float = VIOLATION_TOL
    workers: int = 1

    def __post_init__(self):
        counts = (self.restarts, self.steps, min(self.q_values, default=0))
        if min(counts) < 1 or self.value_cap <= 0 or self.tolerance <= 0:
            raise ValueError("search budgets must be positive")


def default_workers() -> int:
    """Worker count from NORMCHECK_THREADS (default 1)."""
    try:
        return max(1, int(os.environ.get("NORMCHECK_THREADS", "1")))
    except ValueError:
        return 1


# -- Hölder ---------------------------------------------------------------


@dataclass(frozen=True)
class HolderCheckResult:
    lhs: float
    rhs: float
    margin: float
    holds: bool


def _require_nonnegative(hs: Sequence[StepGraphon]) -> None:
    for i, h in enumerate(hs):
        if not h.is_nonnegative():
            raise DomainError(f"kernel {i} takes negative values; the inequality is stated for nonnegative kernels")


def holder_check(a: EdgeAssignment, tolerance: float = HOLDER_TOL) -> HolderCheckResult:
    """Compare t_G(h_1..h_k)^k against prod_l t_G(h_l)."""
    _require_nonnegative(a.kernels)
    k = a.graph.k
    lhs = multilinear_density(a).value ** k
    rhs = math.prod(density(a.graph, h).value for h in a.kernels)
    margin = rhs - lhs
    return HolderCheckResult(lhs, rhs, margin, margin >= -tolerance)


@dataclass(frozen=True)
class HolderCertificate:
    assignment: EdgeAssignment
    lhs: float
    rhs: float
    violation: float
    restart: int = -1


# -- lemma ----------------------------------------------------------------


@dataclass(frozen=True)
class LemmaCertificate:
    graph: Graph
    kernel: StepGraphon
    edge_lo: int
    edge_hi: int
    t_lo: float
    t_hi: float
    gap: float
    restart: int = -1


def _extremes(ts: Sequence[float]) -> tuple[int, int]:
    lo = min(range(len(ts)), key=lambda i: (ts[i], i))
    hi = min(range(len(ts)), key=lambda i: (-ts[i], i))
    return lo, hi


def lemma_equality_check(
    g: Graph, h: StepGraphon, tolerance: float = VIOLATION_TOL, rel_floor: float = EQUALITY_RTOL
) -> Optional[LemmaCertificate]:
    """Certificate when the edge-deleted densities spread by more than ``tolerance``.

    The spread must also exceed ``rel_floor`` times the largest value, so that
    rounding noise on large densities never counts as a gap.
    """
    _require_nonnegative([h])
    if g.k < 2:
        return None
    ts = edge_deleted_densities(g, h)
    lo, hi = _extremes(ts)
    gap = ts[hi] - ts[lo]
    if gap <= tolerance or gap <= rel_floor * abs(ts[hi]):
        return None
    return LemmaCertificate(g, h, lo, hi, ts[lo], ts[hi], gap)


def _upper_coords(q: int) -> list[tuple[int, int]]:
    return [(a, b) for a in range(q) for b in range(a, q)]


def _with_entry(h: StepGraphon, a: int, b: int, x: float) -> StepGraphon:
    v = np.array(h.values)
    v[a, b] = v[b, a] = x
    return StepGraphon(h.weights, v)


def _lemma_restart(g: Graph, budget: SearchBudget, r: int) -> Optional[LemmaCertificate]:
    rng = np.random.default_rng([budget.seed, r])
    q = budget.q_values[r % len(budget.q_values)]
    h = _random_from(rng, q, 0.0, 1.0)

    def rel_gap(h):
        ts = edge_deleted_densities_fast(g, h)
        top = max(ts)
        return (top - min(ts)) / top if top > 0 else 0.0

    best = rel_gap(h)
    step = 0.5
    evals = 1
    coords = _upper_coords(q)
    while evals < budget.steps and step > 1e-4:
        improved = False
        for a, b in coords:
            for sgn in (1.0, -1.0):
                x = float(np.clip(h.values[a, b] + sgn * step, 0.0, budget.value_cap))
                if x == h.values[a, b]:
                    continue
                cand = _with_entry(h, a, b, x)
                val = rel_gap(cand)
                evals += 1
                if val > best + _MIN_GAIN:
                    h, best, improved = cand, val, True
                    break
            if evals >= budget.steps:
                break
        if not improved:
            if best <= EQUALITY_RTOL:
                break  # flat objective: edge-deleted densities agree
            step /= 2
    if best <= EQUALITY_RTOL:
        return None
    # rescale so the largest edge-deleted density is 1 (gap = relative gap)
    top = max(edge_deleted_densities(g, h))
    if top > 0:
        h = StepGraphon(h.weights, h.values * top ** (-1.0 / (g.k - 1)))
    cert = lemma_equality_check(g, h, budget.tolerance)
    return replace(cert, restart=r) if cert is not None else None


def _first_success(fn: Callable[[int], object], restarts: int, workers: int):
    """Result of the lowest restart index that succeeds; serial and parallel agree."""
    if workers <= 1:
        for r in range(restarts):
            out = fn(r)
            if out is not None:
                return out
        return None
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for out in pool.map(fn, range(restarts)):
            if out is not None:
                return out
    return None


def falsify_lemma(g: Graph, budget: SearchBudget = SearchBudget()) -> Optional[LemmaCertificate]:
    """Search for a kernel whose edge-deleted densities differ (random restarts + hill climbing)."""
    if g.k < 2:
        return None
    return _first_success(partial(_lemma_restart, g, budget), budget.restarts, budget.workers)


# -- Hölder falsifier -----------------------------------------------------

_BIPARTITE = np.array([[0.0, 1.0], [1.0, 0.0]])
_STALL_WINDOW = 25
_STALL_GAIN = 1e-6
_STALL_REL = 1e-2


def _seed_assignment(g: Graph, budget: SearchBudget, r: int, rng: np.random.Generator) -> list[np.ndarray]:
    k = g.k
    kind = r % 3
    if kind == 0:
        # one slot carries a structured or random kernel, the rest are constant 1
        slot = (r // 3) % k
        q = 2 if (r // 3) % 2 == 0 else budget.q_values[(r // 6) % len(budget.q_values)]
        mats = [np.ones((q, q)) for _ in range(k)]
        if q == 2 and (r // 3) % 2 == 0:
            mats[slot] = _BIPARTITE.copy()
        else:
            mats[slot] = _random_from(rng, q, 0.0, 1.0).values.copy()
        return mats
    if kind == 1:
        # bipartite pattern with small random diagonals on every slot
        mats = []
        for _ in range(k):
            d = rng.uniform(0.0, 0.2, size=2)
            mats.append(np.array([[d[0], 1.0], [1.0, d[1]]]))
        return mats
    q = budget.q_values[(r // 3) % len(budget.q_values)]
    return [_random_from(rng, q, 0.0, 1.0).values.copy() for _ in range(k)]


def _single_with_grad(g: Graph, w: np.ndarray, m: np.ndarray) -> tuple[float, np.ndarray]:
    t, gs = multilinear_gradient(g, [m] * g.k, w)
    return t, sum(gs)


def _log_ratio(k: int, multi: float, single: Sequence[float]) -> float:
    """log(lhs) - log(rhs) = k log t_G(h_1..h_k) - sum_l log t_G(h_l)."""
    if multi <= 0:
        return -math.inf
    if min(single) <= 0:
        return math.inf
    return k * math.log(multi) - math.fsum(math.log(s) for s in single)


def _symmetrize_grad(gl: np.ndarray) -> np.ndarray:
    # derivative w.r.t. the tied pair values[a, b] = values[b, a]
    return gl + gl.T - np.diag(np.diag(gl))


def _normalized(g: Graph, w: np.ndarray, mats: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Rescale each kernel so t_G(h_l) = 1; the log-ratio is invariant under this."""
    out = []
    for m in mats:
        t = density(g, StepGraphon(w, m)).value
        out.append(m * t ** (-1.0 / g.k) if t > 0 else m)
    return out


def _holder_certificate(g: Graph, w: np.ndarray, mats, tol: float, r: int) -> Optional[HolderCertificate]:
    a = EdgeAssignment(g, tuple(StepGraphon(w, m) for m in _normalized(g, w, mats)))
    res = holder_check(a)
    violation = res.lhs - res.rhs
    if violation > tol:
        return HolderCertificate(a, res.lhs, res.rhs, violation, r)
    return None


def holder_ascent(g: Graph, budget: SearchBudget, r: int) -> tuple[Optional[HolderCertificate], float]:
    """Restart ``r`` of the Hölder search: certificate (if any) and best log(lhs/rhs) reached."""
    rng = np.random.default_rng([budget.seed, r])
    mats = _seed_assignment(g, budget, r, rng)
    q = mats[0].shape[0]
    w = np.full(q, 1.0 / q)
    k = g.k
    cert = _holder_certificate(g, w, mats, budget.tolerance, r)
    if cert is not None:
        return cert, (math.log(cert.lhs) - math.log(cert.rhs)) if cert.rhs > 0 else math.inf
    if multilinear_density(EdgeAssignment(g, tuple(StepGraphon(w, m) for m in mats))).value <= 0:
        mats = [np.maximum(m, 1e-3) for m in mats]
    single, sgrads = map(list, zip(*(_single_with_grad(g, w, m) for m in mats)))
    if min(single) <= 0:
        return None, -math.inf
    coords = _upper_coords(q)
    step = 0.25
    history: list[float] = []
    for _ in range(budget.steps):
        multi, gm = multilinear_gradient(g, mats, w)
        cur = _log_ratio(k, multi, single)
        history.append(cur)
        if len(history) > _STALL_WINDOW:
            old = history[-_STALL_WINDOW - 1]
            if cur - old < _STALL_GAIN + _STALL_REL * abs(old):
                break
        grads = [_symmetrize_grad(k * gm[l] / multi - sgrads[l] / single[l]) for l in range(k)]
        # Gauss-Southwell: the movable coordinate with the steepest slope
        best = None
        for l, gl in enumerate(grads):
            for a, b in coords:
                x, d = mats[l][a, b], gl[a, b]
                if (d > 0 and x < budget.value_cap) or (d < 0 and x > 0):
                    if best is None or abs(d) > best[0]:
                        best = (abs(d), l, a, b)
        if best is None or best[0] < 1e-12:
            break
        _, l, a, b = best
        direction = math.copysign(1.0, grads[l][a, b])
        # the multilinear density is linear in each entry of slot l
        slope = _symmetrize_grad(gm[l])[a, b]
        accepted = False
        while step > 1e-6:
            m = mats[l].copy()
            x = float(np.clip(m[a, b] + direction * step, 0.0, budget.value_cap))
            delta = x - m[a, b]
            m[a, b] = m[b, a] = x
            trial_single = list(single)
            trial_single[l] = density(g, StepGraphon(w, m)).value
            val = _log_ratio(k, multi + delta * slope, trial_single)
            if val > cur + _MIN_GAIN:
                mats[l] = m
                single[l], sgrads[l] = _single_with_grad(g, w, m)
                accepted = True
                step *= 1.5
                break
            step /= 2
        if not accepted:
            break
        if val > 0:
            cert = _holder_certificate(g, w, mats, budget.tolerance, r)
            if cert is not None:
                return cert, val
    multi = multilinear_density(EdgeAssignment(g, tuple(StepGraphon(w, m) for m in mats))).value
    return _holder_certificate(g, w, mats, budget.tolerance, r), _log_ratio(k, multi, single)


def _holder_restart(g: Graph, budget: SearchBudget, r: int) -> Optional[HolderCertificate]:
    return holder_ascent(g, budget, r)[0]


def falsify_holder(g: Graph, budget: SearchBudget = SearchBudget()) -> Optional[HolderCertificate]:
    """Search nonnegative edge assignments violating the Hölder-type inequality."""
    if g.k < 2:
        return None
    return _first_success(partial(_holder_restart, g, budget), budget.restarts, budget.workers)


# -- pipeline -------------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    passed: Optional[bool]  # None: not run
    detail: str = ""


@dataclass
class NormingReport:
    graph: Graph
    checks: list[CheckResult] = field(default_factory=list)
    verdict: str = PASSES
    reason: str = ""
    lemma_certificate: Optional[LemmaCertificate] = None
    holder_certificate: Optional[HolderCertificate] = None
    implementation_flag: bool = False
    caveat: str = ""
    known_status: str = ""
    part_degrees: Optional[tuple[int, int]] = None

    @property
    def summary(self) -> str:
        return f"n={self.graph.n} k={self.graph.k} graph6={to_graph6(self.graph)}"

    def check(self, name: str) -> CheckResult:
        return next(c for c in self.checks if c.name == name)


CHECK_ORDER = (
    "components_isomorphic",
    "bipartite",
    "biregular",
    "edge_transitive",
    "lemma_certificate",
    "holder_certificate",
)


def necessary_conditions_pipeline(
    g: Graph, budget: SearchBudget = SearchBudget(), name: Optional[str] = None
) -> NormingReport:
    """Structural checks first, then the budgeted certificate searches.

    The verdict is either a refutation or "passes all necessary conditions";
    it never claims weak norming.
    """
    report = NormingReport(g)
    if name is not None:
        try:
            e = catalog.entry(name)
            report.known_status = f"{e.known_status}: {e.note}" if e.note else e.known_status
        except KeyError:
            pass

    def fail(check: str, reason: str) -> NormingReport:
        report.verdict = NOT_WN
        report.reason = reason
        done = {c.name for c in report.checks}
        report.checks += [CheckResult(c, None, "skipped") for c in CHECK_ORDER if c not in done]
        return report

    comp = components_isomorphic(g)
    if not comp.ok:
        sizes = [len(c) for c in comp.components]
        report.checks.append(CheckResult("components_isomorphic", False, f"non-singleton component sizes {sizes}"))
        return fail("components_isomorphic", "non-singleton connected components are not isomorphic")
    report.checks.append(
        CheckResult("components_isomorphic", True, f"{len(comp.components)} non-singleton component(s)")
    )

    bip = is_bipartite(g)
    if bip is None:
        cyc = odd_cycle(g)
        report.checks.append(CheckResult("bipartite", False, f"odd cycle {cyc}"))
        return fail("bipartite", "not bipartite")
    report.checks.append(CheckResult("bipartite", True))

    # a graph is handled through one of its (isomorphic) non-singleton components
    core = induced_subgraph(g, sorted(comp.components[0])) if comp.components else Graph(0)
    if core.k == 0:
        report.checks.append(CheckResult("biregular", True, "no edges"))
        report.checks.append(CheckResult("edge_transitive", True, "no edges (by convention)"))
    else:
        cb = is_bipartite(core)
        ab = part_degrees(core, cb)
        if ab is None:
            da = sorted({core.degree(v) for v in cb.part_a})
            db = sorted({core.degree(v) for v in cb.part_b})
            report.checks.append(CheckResult("biregular", False, f"part degrees A={da} B={db}"))
            return fail("biregular", f"not biregular (part degrees A={da}, B={db})")
        report.part_degrees = ab
        report.checks.append(CheckResult("biregular", True, f"(a, b) = {ab}"))
        if ab[0] == 1:
            report.checks.append(CheckResult("edge_transitive", True, "star (a = 1)"))
        else:
            orbits = edge_orbits(core)
            if len(orbits.orbits) != 1:
                report.checks.append(
                    CheckResult("edge_transitive", False, f"{len(orbits.orbits)} edge orbits")
                )
                return fail("edge_transitive", f"not edge-transitive ({len(orbits.orbits)} edge orbits)")
            report.checks.append(CheckResult("edge_transitive", True, "1 edge orbit"))

    lemma = falsify_lemma(core, budget) if core.k >= 2 else None
    if lemma is not None:
        report.lemma_certificate = lemma
        report.checks.append(CheckResult("lemma_certificate", False, f"gap {lemma.gap:.6g}"))
        # edge-transitive graphs have identically equal edge-deleted densities
        report.implementation_flag = True
        return fail("lemma_certificate", "edge-deleted densities differ (implementation inconsistency flagged)")
    report.checks.append(CheckResult("lemma_certificate", True, INCONCLUSIVE))

    holder = falsify_holder(core, budget) if core.k >= 2 else None
    if holder is not None:
        report.holder_certificate = holder
        report.checks.append(CheckResult("holder_certificate", False, f"violation {holder.violation:.6g}"))
        return fail("holder_certificate", "Hölder-type inequality violated by a nonnegative assignment")
    report.checks.append(CheckResult("holder_certificate", True, INCONCLUSIVE))
    report.verdict = PASSES
    report.caveat = INSUFFICIENCY_CAVEAT
    return report


# -- proof trace ----------------------------------------------------------


@dataclass(frozen=True)
class TheoremTrace:
    edge_i: int
    edge_j: int
    pi: tuple[int, ...]
    maps_deleted: bool  # pi is an isomorphism G - e_i -> G - e_j
    maps_edge: bool  # pi sends the endpoints of e_i onto those of e_j
    is_automorphism: bool

    @property
    def verified(self) -> bool:
        return self.maps_deleted and self.maps_edge and self.is_automorphism


def _check_trace_preconditions(g: Graph) -> tuple[int, int]:
    if g.k == 0 or not is_connected(g):
        raise PreconditionError("graph must be connected with at least one edge")
    bip = is_bipartite(g)
    if bip is None:
        raise PreconditionError("graph must be bipartite")
    ab = part_degrees(g, bip)
    if ab is None:
        raise PreconditionError("graph must be biregular")
    if ab[0] < 2:
        raise PreconditionError(f"minimum part degree a = {ab[0]} < 2 (a star; handled separately)")
    return ab


def theorem_trace(g: Graph, e_i: int, e_j: int) -> Optional[TheoremTrace]:
    """First isomorphism G - e_i -> G - e_j that carries e_i onto e_j.

    Both that property and membership in Aut(G) are checked independently.
    """
    _check_trace_preconditions(g)
    gi, gj = delete_edge(g, e_i), delete_edge(g, e_j)
    target = frozenset(g.edges[e_j])
    u, v = g.edges[e_i]
    for pi in iter_isomorphisms(gi, gj):
        if frozenset((pi[u], pi[v])) == target:
            return TheoremTrace(e_i, e_j, pi, is_isomorphism(gi, gj, pi), True, is_isomorphism(g, g, pi))
    return None


# -- density fingerprint --------------------------------------------------


def density_fingerprint_equal(f: Graph, g: Graph, trials: int = 8, seed: int = 0, tol: float = 1e-9) -> bool:
    """One-sided test that t_F(h) = t_G(h) on random nonnegative 3-block kernels.

    Isomorphic graphs (up to isolated vertices) always pass; non-isomorphic
    pairs are expected but not guaranteed to fail.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    for t in range(trials):
        h = random_graphon(3, 0.0, 1.0, seed * 1_000_003 + t)
        if abs(density(f, h).value - density(g, h).value) > tol:
            return False
    return True


def has_connected_edge_deletion(g: Graph) -> bool:
    return any(is_connected(delete_edge(g, l)) for l in range(g.k))
