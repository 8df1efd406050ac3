"""Acceptance criteria 1-12, one pass/fail line each.

Run with ``pytest tests/test_acceptance.py -v`` or directly with
``python3 tests/test_acceptance.py``. Criterion 12 is a stretch goal: it is
reported but never fails the suite.
"""

from __future__ import annotations

import math
import sys
import time
from dataclasses import dataclass

import numpy as np
import pytest

from normcheck import catalog
from normcheck.analyzer import (
    INSUFFICIENCY_CAVEAT,
    NOT_WN,
    PASSES,
    SearchBudget,
    falsify_holder,
    falsify_lemma,
    holder_check,
    necessary_conditions_pipeline,
    theorem_trace,
)
from normcheck.certificates import dumps, verify
from normcheck.density import (
    EdgeAssignment,
    brute_force_density,
    density,
    edge_deleted_densities,
    edge_deleted_densities_fast,
    multilinear_density,
    uniform_assignment,
)
from normcheck.graphon import ONE, _random_from
from normcheck.graphs import delete_edge
from normcheck.selftest import pair_expansion, random_instance, uniform_expansion
from normcheck.symmetry import edge_orbits

# pinned tolerances and time limits
ORACLE_RTOL = 1e-10
ORACLE_SECONDS = 30.0
NORMALIZATION_TOL = 1e-12
NORMALIZATION_SECONDS = 10.0
MULTILINEAR_TOL = 1e-12  # scaled by max(1, |t|)
EDGE_DELETED_RTOL = 1e-10
HOLDER_MARGIN = -1e-9
FALSIFY_SECONDS = 10.0
LEMMA_MIN_GAP = 0.05
ORBIT_SECONDS = 5.0
PIPELINE_SECONDS = 60.0
TRACE_SECONDS = 60.0
SYMMETRY_GAP = 1e-10

# criterion 9 runs the pipeline on a reduced search budget (see README)
PIPELINE_BUDGET = SearchBudget(restarts=10, steps=100, q_values=(2,))
# criterion 12: twice the default ascent steps; 3-block torus restarts take minutes
# each, so they are left to scripts/torus_holder_search.py
STRETCH_BUDGET = SearchBudget(restarts=50, steps=1000, q_values=(2,))


@dataclass
class Outcome:
    passed: bool
    detail: str


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(b))


def criterion_1() -> Outcome:
    rng = np.random.default_rng([0, 1])
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        g, h = random_instance(rng, max_n=8, max_q=3, lo=-1.0, hi=2.0)
        worst = max(worst, _rel(density(g, h).value, brute_force_density(g, h).value))
    dt = time.perf_counter() - t0
    return Outcome(worst <= ORACLE_RTOL and dt < ORACLE_SECONDS, f"200 pairs, worst rel {worst:.2e}, {dt:.1f}s")


def criterion_2() -> Outcome:
    t0 = time.perf_counter()
    entries = catalog.listing()
    worst = max(abs(density(e.graph, ONE).value - 1.0) for e in entries)
    dt = time.perf_counter() - t0
    has_torus = any(e.name == "torus_6_6" for e in entries)
    ok = worst <= NORMALIZATION_TOL and dt < NORMALIZATION_SECONDS and has_torus
    return Outcome(ok, f"{len(entries)} catalog graphs, worst {worst:.1e}, {dt:.2f}s")


def criterion_3() -> Outcome:
    rng = np.random.default_rng([0, 3])
    worst = 0.0
    for _ in range(50):
        g, h = random_instance(rng, min_edges=1)
        t = density(g, h).value
        worst = max(worst, abs(multilinear_density(uniform_assignment(g, h)).value - t) / max(1.0, abs(t)))
    return Outcome(worst <= MULTILINEAR_TOL, f"50 cases, worst {worst:.2e}")


def criterion_4() -> Outcome:
    rng = np.random.default_rng([0, 4])
    worst = 0.0
    checked = 0
    for _ in range(50):
        g, h = random_instance(rng, min_edges=1)
        slow = edge_deleted_densities(g, h)
        fast = edge_deleted_densities_fast(g, h)
        for l in range(g.k):
            ref = brute_force_density(delete_edge(g, l), h).value
            padded = [h] * g.k
            padded[l] = ONE
            multi = multilinear_density(EdgeAssignment(g, tuple(padded))).value
            worst = max(worst, _rel(slow[l], ref), _rel(fast[l], ref), _rel(multi, ref))
            checked += 1
    return Outcome(worst <= EDGE_DELETED_RTOL, f"50 cases ({checked} edges), both paths, worst rel {worst:.2e}")


def criterion_5() -> Outcome:
    rng = np.random.default_rng([0, 2])
    bad = []
    orders = []
    for i in range(20):
        g, h = random_instance(rng, max_n=6, lo=0.2, hi=1.0, min_edges=2)
        l1, l2 = (int(x) for x in rng.choice(g.k, size=2, replace=False))
        for label, chk in (("sum", uniform_expansion(g, h)), ("pair", pair_expansion(g, h, l1, l2))):
            orders.append(chk.order)
            if not chk.ok:
                bad.append(f"{i}:{label}")
    lo, hi = min(orders), max(orders)
    return Outcome(not bad, f"20 cases, remainder order in [{lo:.3f}, {hi:.3f}], failures {bad or 'none'}")


HOLDER_FIXTURES = ("C4", "C6", "K_2_2", "K_2_3", "K_3_3", "Q3", "star_1", "star_2", "star_3", "star_4")


def criterion_6() -> Outcome:
    worst = math.inf
    for gi, name in enumerate(HOLDER_FIXTURES):
        g = catalog.build(name)
        rng = np.random.default_rng([0, 6, gi])
        for _ in range(100):
            q = int(rng.integers(2, 4))
            ks = tuple(_random_from(rng, q, 0.0, 1.0) for _ in range(g.k))
            worst = min(worst, holder_check(EdgeAssignment(g, ks)).margin)
    return Outcome(worst >= HOLDER_MARGIN, f"{len(HOLDER_FIXTURES)} graphs x 100 assignments, min margin {worst:.2e}")


def criterion_7() -> Outcome:
    parts = []
    ok = True
    for name in ("K3", "C5"):
        t0 = time.perf_counter()
        cert = falsify_holder(catalog.build(name))
        dt = time.perf_counter() - t0
        good = cert is not None and verify(dumps(cert), force_oracle=True).ok and dt < FALSIFY_SECONDS
        ok &= good
        parts.append(f"{name} holder " + (f"violation {cert.violation:.4g} r={cert.restart} {dt:.1f}s" if cert else "none"))
    t0 = time.perf_counter()
    cert = falsify_lemma(catalog.path(4))
    dt = time.perf_counter() - t0
    good = cert is not None and cert.gap >= LEMMA_MIN_GAP and verify(dumps(cert), force_oracle=True).ok
    ok &= good and dt < FALSIFY_SECONDS
    parts.append("P4 lemma " + (f"gap {cert.gap:.4g} r={cert.restart} {dt:.1f}s" if cert else "none"))
    return Outcome(ok, "; ".join(parts))


ORBIT_FIXTURES = {"P4": 2, "C4": 1, "C6": 1, "K_3_3": 1, "Q3": 1, "star_3": 1, "torus_6_6": 1}


def criterion_8() -> Outcome:
    ok = True
    parts = []
    for name, want in ORBIT_FIXTURES.items():
        t0 = time.perf_counter()
        got = len(edge_orbits(catalog.build(name)).orbits)
        dt = time.perf_counter() - t0
        ok &= got == want and dt < ORBIT_SECONDS
        parts.append(f"{name}={got}")
    return Outcome(ok, ", ".join(parts))


PIPELINE_FIXTURES = {
    "P4": (NOT_WN, "biregular"),
    "K3": (NOT_WN, "bipartite"),
    "C4+C6": (NOT_WN, "components_isomorphic"),
    "C4": (PASSES, None),
    "K_3_3": (PASSES, None),
    "Q3": (PASSES, None),
    "torus_6_6": (PASSES, None),
}


def criterion_9() -> Outcome:
    t0 = time.perf_counter()
    ok = True
    parts = []
    for name, (verdict, failing) in PIPELINE_FIXTURES.items():
        rep = necessary_conditions_pipeline(catalog.build(name), PIPELINE_BUDGET, name=name)
        good = rep.verdict == verdict and not rep.implementation_flag
        if failing is not None:
            good &= rep.check(failing).passed is False
        else:
            good &= rep.caveat == INSUFFICIENCY_CAVEAT
        if name == "torus_6_6":
            good &= "toroidal grids" in rep.caveat and "not to be weakly norming" in rep.caveat
        ok &= good
        parts.append(f"{name}:{'ok' if good else rep.verdict}")
    dt = time.perf_counter() - t0
    return Outcome(ok and dt < PIPELINE_SECONDS, f"{', '.join(parts)}; {dt:.1f}s")


def criterion_10() -> Outcome:
    t0 = time.perf_counter()
    total = verified = 0
    for name in ("C6", "K_2_3", "K_3_3", "Q3"):
        g = catalog.build(name)
        for i in range(g.k):
            for j in range(g.k):
                tr = theorem_trace(g, i, j)
                total += 1
                verified += tr is not None and tr.verified
    dt = time.perf_counter() - t0
    return Outcome(verified == total and dt < TRACE_SECONDS, f"{verified}/{total} ordered pairs verified, {dt:.1f}s")


def criterion_11() -> Outcome:
    worst = 0.0
    names = [n for n, want in ORBIT_FIXTURES.items() if want == 1]
    for gi, name in enumerate(names):
        g = catalog.build(name)
        rng = np.random.default_rng([0, 11, gi])
        q = 2 if g.n > 16 else 3  # 3-block kernels on the torus cost ~0.1 s per contraction
        for _ in range(50):
            ts = edge_deleted_densities(g, _random_from(rng, q, 0.0, 1.0))
            worst = max(worst, max(ts) - min(ts))
    return Outcome(worst <= SYMMETRY_GAP, f"{', '.join(names)}: 50 kernels each, max gap {worst:.2e}")


def criterion_12() -> Outcome:
    t0 = time.perf_counter()
    cert = falsify_holder(catalog.build("torus_6_6"), STRETCH_BUDGET)
    dt = time.perf_counter() - t0
    b = STRETCH_BUDGET
    budget = f"{b.restarts} restarts x {b.steps} steps, q in {b.q_values}"
    if cert is None:
        return Outcome(False, f"no violation found ({budget}, {dt:.0f}s); inconclusive")
    ok = verify(dumps(cert)).ok
    return Outcome(ok, f"violation {cert.violation:.3g} at restart {cert.restart}, verified={ok}, {dt:.0f}s")


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 13)}
TITLES = {
    1: "oracle equivalence",
    2: "normalization",
    3: "multilinear identity",
    4: "edge-deleted identity",
    5: "perturbation expansions",
    6: "Hölder positive suite",
    7: "falsification suite",
    8: "edge-orbit fixtures",
    9: "pipeline fixtures",
    10: "theorem-trace totality",
    11: "edge-transitive lemma symmetry",
    12: "stretch: torus_6_6 Hölder search",
}


def _line(i: int, out: Outcome) -> str:
    tag = "PASS" if out.passed else ("NOT MET (non-blocking)" if i == 12 else "FAIL")
    return f"criterion {i:2d} [{tag}] {TITLES[i]}: {out.detail}"


def _report(capsys, i: int) -> Outcome:
    out = CRITERIA[i]()
    with capsys.disabled():
        print("\n" + _line(i, out))
    return out


@pytest.mark.parametrize("i", range(1, 12))
def test_criterion(i, capsys):
    out = _report(capsys, i)
    assert out.passed, out.detail


@pytest.mark.slow
def test_criterion_12_stretch(capsys):
    out = _report(capsys, 12)
    if not out.passed:
        pytest.xfail(f"stretch criterion not met: {out.detail}")


if __name__ == "__main__":
    blocking_ok = True
    skip_stretch = "--no-stretch" in sys.argv
    for i in CRITERIA:
        if i == 12 and skip_stretch:
            continue
        res = CRITERIA[i]()
        print(_line(i, res), flush=True)
        blocking_ok &= res.passed or i == 12
    sys.exit(0 if blocking_ok else 1)
