"""Seeded property suites shared by the ``selftest`` command and the test-suite."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import catalog
from .analyzer import EQUALITY_RTOL
from .density import (
    brute_force_density,
    density,
    edge_deleted_densities,
    perturbed_pair_density,
    uniform_direction_derivative,
)
from .graphon import ONE, _random_from, shift
from .graphs import Graph, erdos_renyi, relabel
from .symmetry import edge_orbits

ORACLE_RTOL = 1e-10
NORMALIZATION_TOL = 1e-12
FD_RTOL = 1e-6
ORDER_TARGET, ORDER_SLACK = 2.0, 0.3
EPSILONS = (1e-3, 1e-4)


@dataclass
class SuiteResult:
    name: str
    passed: bool
    cases: int
    worst: float
    seconds: float = 0.0


def random_instance(rng: np.random.Generator, max_n: int = 8, max_q: int = 3, lo: float = -1.0, hi: float = 2.0, min_edges: int = 0):
    while True:
        n = int(rng.integers(1, max_n + 1))
        g = erdos_renyi(n, float(rng.uniform(0.2, 0.8)), rng)
        if g.k >= min_edges:
            break
    q = int(rng.integers(1, max_q + 1))
    return g, _random_from(rng, q, lo, hi)


def oracle_equivalence(cases: int = 200, seed: int = 0) -> SuiteResult:
    rng = np.random.default_rng([seed, 1])
    worst = 0.0
    for _ in range(cases):
        g, h = random_instance(rng)
        fast = density(g, h).value
        slow = brute_force_density(g, h).value
        worst = max(worst, abs(fast - slow) / max(1.0, abs(slow)))
    return SuiteResult("oracle_equivalence", worst <= ORACLE_RTOL, cases, worst)


def normalization(seed: int = 0) -> SuiteResult:
    worst = 0.0
    entries = catalog.listing()
    for e in entries:
        worst = max(worst, abs(density(e.graph, ONE).value - 1.0))
    return SuiteResult("normalization", worst <= NORMALIZATION_TOL, len(entries), worst)


FD_NOISE = 1e-11


def _order(errs: tuple[float, ...]) -> float:
    if min(errs) <= 0:
        return math.inf
    return math.log(errs[0] / errs[1]) / math.log(EPSILONS[0] / EPSILONS[1])


@dataclass
class ExpansionCheck:
    """Central differences and first-order remainders of an expansion at EPSILONS."""

    exact: float
    slopes: tuple[float, ...]
    remainders: tuple[float, ...]  # |f(e) - f(0) - exact * e|

    @property
    def fd_errors(self) -> tuple[float, ...]:
        scale = max(1.0, abs(self.exact))
        return tuple(abs(s - self.exact) / scale for s in self.slopes)

    @property
    def fd_error(self) -> float:
        """Relative slope error at the smallest step."""
        return self.fd_errors[-1]

    @property
    def fd_order(self) -> float | None:
        """Convergence order of the slope error; None when it sits at rounding level."""
        errs = self.fd_errors
        return None if min(errs) <= FD_NOISE else _order(errs)

    @property
    def order(self) -> float:
        return _order(self.remainders)

    @property
    def ok(self) -> bool:
        if self.fd_error > FD_RTOL or abs(self.order - ORDER_TARGET) > ORDER_SLACK:
            return False
        fo = self.fd_order
        if fo is None:
            return self.fd_errors[-1] <= FD_NOISE
        return abs(fo - ORDER_TARGET) <= ORDER_SLACK


def _expansion(f, exact: float) -> ExpansionCheck:
    f0 = f(0.0)
    slopes = tuple((f(e) - f(-e)) / (2 * e) for e in EPSILONS)
    rems = tuple(abs(f(e) - f0 - exact * e) for e in EPSILONS)
    return ExpansionCheck(exact, slopes, rems)


def uniform_expansion(g: Graph, h) -> ExpansionCheck:
    """t_G(h + e) against t_G(h) + (sum_l t_l) e."""
    return _expansion(lambda e: density(g, shift(h, e)).value, uniform_direction_derivative(g, h))


def pair_expansion(g: Graph, h, l1: int, l2: int) -> ExpansionCheck:
    """t_G(h+e, h-e, h, ..) against t_G(h) + (t_l1 - t_l2) e."""
    ts = edge_deleted_densities(g, h)
    return _expansion(lambda e: perturbed_pair_density(g, h, e, l1, l2), ts[l1] - ts[l2])


def derivative(cases: int = 20, seed: int = 0) -> SuiteResult:
    rng = np.random.default_rng([seed, 2])
    worst = 0.0
    ok = True
    for _ in range(cases):
        g, h = random_instance(rng, max_n=6, lo=0.2, hi=1.0, min_edges=2)
        l1, l2 = (int(x) for x in rng.choice(g.k, size=2, replace=False))
        for chk in (uniform_expansion(g, h), pair_expansion(g, h, l1, l2)):
            ok &= chk.ok
            worst = max(worst, chk.fd_error)
    return SuiteResult("derivative", ok, cases, worst)


EDGE_TRANSITIVE_FIXTURES = ("C4", "C6", "K_2_2", "K_3_3", "Q3", "star_3", "torus_6_6")


def symmetry(cases: int = 50, seed: int = 0, names=EDGE_TRANSITIVE_FIXTURES) -> SuiteResult:
    """Edge-transitive graphs have equal edge-deleted densities; orbit sizes survive relabelling."""
    rng = np.random.default_rng([seed, 3])
    worst = 0.0
    ok = True
    for name in names:
        g = catalog.build(name)
        q = 2 if g.n > 16 else 3
        for _ in range(cases):
            ts = edge_deleted_densities(g, _random_from(rng, q, 0.0, 1.0))
            gap = max(ts) - min(ts)
            worst = max(worst, gap)
        perm = [int(x) for x in rng.permutation(g.n)]
        sizes = sorted(len(o) for o in edge_orbits(g).orbits)
        ok &= sizes == sorted(len(o) for o in edge_orbits(relabel(g, perm)).orbits)
    ok &= worst <= EQUALITY_RTOL
    return SuiteResult("symmetry", ok, cases * len(names), worst)


def run_all(quick: bool = False, seed: int = 0) -> list[SuiteResult]:
    plan = [
        (oracle_equivalence, dict(cases=40 if quick else 200)),
        (normalization, {}),
        (derivative, dict(cases=5 if quick else 20)),
        (symmetry, dict(cases=3 if quick else 50, names=EDGE_TRANSITIVE_FIXTURES[:-1] if quick else EDGE_TRANSITIVE_FIXTURES)),
    ]
    out = []
    for fn, kwargs in plan:
        t0 = time.perf_counter()
        res = fn(seed=seed, **kwargs)
        res.seconds = time.perf_counter() - t0
        out.append(res)
    return out
