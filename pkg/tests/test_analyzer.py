import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import HALVES, graphs
from normcheck import catalog
from normcheck.analyzer import (
    INSUFFICIENCY_CAVEAT,
    NOT_WN,
    PASSES,
    DomainError,
    PreconditionError,
    SearchBudget,
    density_fingerprint_equal,
    falsify_holder,
    falsify_lemma,
    has_connected_edge_deletion,
    holder_check,
    lemma_equality_check,
    necessary_conditions_pipeline,
    theorem_trace,
)
from normcheck.density import (
    EdgeAssignment,
    brute_force_density,
    brute_force_multilinear,
    uniform_assignment,
)
from normcheck.graphon import ONE, StepGraphon, random_graphon
from normcheck.graphs import Graph, delete_edge, disjoint_union, is_connected, relabel
from normcheck.symmetry import edge_image, is_isomorphism

QUICK = SearchBudget(restarts=10, steps=100, q_values=(2,))


def rel(a, b):
    return abs(a - b) / max(1.0, abs(b))


def test_holder_equality_case():
    for name in ["C4", "P4", "K3", "Q3"]:
        g = catalog.build(name)
        for seed in range(5):
            res = holder_check(uniform_assignment(g, random_graphon(3, 0, 1, seed)))
            assert abs(res.margin) <= 1e-12 and res.holds


def test_holder_k3_analytic(bip_kernel):
    res = holder_check(EdgeAssignment(catalog.complete(3), (ONE, ONE, bip_kernel)))
    assert res.lhs == pytest.approx(0.125, abs=1e-15)
    assert res.rhs == 0.0
    assert not res.holds
    assert brute_force_density(catalog.complete(3), bip_kernel).value == 0.0


@pytest.mark.parametrize("seed", range(100))
def test_holder_holds_on_c4(seed):
    rng = np.random.default_rng(seed)
    g = catalog.cycle(4)
    ks = tuple(StepGraphon(np.full(3, 1 / 3), _sym(rng.uniform(0, 1, (3, 3)))) for _ in range(g.k))
    assert holder_check(EdgeAssignment(g, ks)).holds


def _sym(m):
    return np.triu(m) + np.triu(m, 1).T


def test_holder_rejects_signed():
    h = StepGraphon(HALVES, [[1.0, -0.1], [-0.1, 1.0]])
    with pytest.raises(DomainError):
        holder_check(uniform_assignment(catalog.cycle(4), h))
    with pytest.raises(DomainError):
        lemma_equality_check(catalog.cycle(4), h)


def test_lemma_check_examples(p4_kernel):
    assert lemma_equality_check(catalog.cycle(4), random_graphon(3, 0, 1, 2)) is None
    assert lemma_equality_check(catalog.path(4), ONE) is None
    cert = lemma_equality_check(catalog.path(4), p4_kernel)
    assert cert is not None
    assert cert.gap == pytest.approx(0.0625, abs=1e-15)
    assert (cert.edge_lo, cert.edge_hi) == (1, 0)
    assert cert.t_lo == pytest.approx(0.25) and cert.t_hi == pytest.approx(0.3125)


def test_lemma_check_tolerance(p4_kernel):
    assert lemma_equality_check(catalog.path(4), p4_kernel, tolerance=0.07) is None


def _check_lemma_certificate(cert):
    ts = [brute_force_density(delete_edge(cert.graph, l), cert.kernel).value for l in (cert.edge_lo, cert.edge_hi)]
    assert rel(cert.t_lo, ts[0]) <= 1e-10 and rel(cert.t_hi, ts[1]) <= 1e-10
    assert cert.gap > 1e-6 and cert.kernel.is_nonnegative()


def _check_holder_certificate(cert):
    a = cert.assignment
    lhs = brute_force_multilinear(a).value ** a.graph.k
    rhs = math.prod(brute_force_density(a.graph, h).value for h in a.kernels)
    assert rel(cert.lhs, lhs) <= 1e-10 and rel(cert.rhs, rhs) <= 1e-10
    assert lhs - rhs > 1e-6
    assert all(h.is_nonnegative() for h in a.kernels)


def test_falsify_lemma_p4():
    cert = falsify_lemma(catalog.path(4))
    assert cert is not None and cert.gap >= 0.05
    _check_lemma_certificate(cert)


@pytest.mark.parametrize("name", ["C4", "star_3", "K_2_3"])
def test_falsify_lemma_absent_on_edge_transitive(name):
    assert falsify_lemma(catalog.build(name), QUICK) is None


@pytest.mark.parametrize("name", ["K3", "C5"])
def test_falsify_holder_finds_certificates(name):
    cert = falsify_holder(catalog.build(name))
    assert cert is not None
    _check_holder_certificate(cert)


def test_falsify_holder_absent_on_c4():
    assert falsify_holder(catalog.cycle(4)) is None


def test_falsifiers_deterministic():
    b = SearchBudget(restarts=5, steps=50, seed=3)
    a1, a2 = falsify_holder(catalog.path(4), b), falsify_holder(catalog.path(4), b)
    assert (a1 is None) == (a2 is None)
    if a1 is not None:
        assert a1.lhs == a2.lhs and a1.restart == a2.restart
    l1, l2 = falsify_lemma(catalog.path(5), b), falsify_lemma(catalog.path(5), b)
    assert l1.gap == l2.gap and l1.restart == l2.restart


def test_parallel_matches_serial():
    serial = falsify_holder(catalog.cycle(5), SearchBudget(restarts=6, steps=50))
    parallel = falsify_holder(catalog.cycle(5), SearchBudget(restarts=6, steps=50, workers=2))
    assert serial.restart == parallel.restart and serial.lhs == parallel.lhs


def test_budget_validation():
    with pytest.raises(ValueError):
        SearchBudget(restarts=0)
    with pytest.raises(ValueError):
        SearchBudget(q_values=())


@pytest.mark.parametrize(
    "name,check",
    [("P4", "biregular"), ("K3", "bipartite"), ("C4+C6", "components_isomorphic"), ("P5", "biregular")],
)
def test_pipeline_refutations(name, check):
    rep = necessary_conditions_pipeline(catalog.build(name), QUICK, name=name)
    assert rep.verdict == NOT_WN
    assert rep.check(check).passed is False
    assert [c.name for c in rep.checks][-1] == "holder_certificate"
    assert not rep.caveat


def test_pipeline_not_edge_transitive():
    # hexagonal prism C6 x K2: bipartite and 3-regular, rungs form their own orbit
    edges = [(i, (i + 1) % 6) for i in range(6)] + [(6 + i, 6 + (i + 1) % 6) for i in range(6)]
    edges += [(i, i + 6) for i in range(6)]
    g = Graph(12, tuple(edges))
    rep = necessary_conditions_pipeline(g, QUICK)
    assert rep.check("biregular").passed and rep.part_degrees == (3, 3)
    assert rep.check("edge_transitive").passed is False
    assert rep.verdict == NOT_WN and "2 edge orbits" in rep.reason


@pytest.mark.parametrize("name", ["C4", "K_3_3", "star_3", "C4+C4"])
def test_pipeline_passes(name):
    rep = necessary_conditions_pipeline(catalog.build(name), QUICK, name=name)
    assert rep.verdict == PASSES
    assert rep.caveat == INSUFFICIENCY_CAVEAT
    assert not rep.implementation_flag
    assert "weakly norming" not in rep.verdict.replace("NotWeaklyNorming", "")


def test_pipeline_known_status_does_not_drive_verdict():
    rep = necessary_conditions_pipeline(catalog.build("C4"), QUICK, name="C4")
    assert "Hatami" in rep.known_status
    plain = necessary_conditions_pipeline(catalog.build("C4"), QUICK)
    assert plain.verdict == rep.verdict and plain.known_status == ""


def test_pipeline_flags_lemma_certificate(monkeypatch):
    from normcheck import analyzer

    fake = analyzer.LemmaCertificate(catalog.cycle(4), ONE, 0, 1, 0.0, 1.0, 1.0)
    monkeypatch.setattr(analyzer, "falsify_lemma", lambda g, b: fake)
    rep = analyzer.necessary_conditions_pipeline(catalog.cycle(4), QUICK)
    assert rep.verdict == NOT_WN and rep.implementation_flag


@pytest.mark.parametrize("name", ["C6", "K_2_3", "K_3_3", "Q3"])
def test_theorem_trace_totality(name):
    g = catalog.build(name)
    for i in range(g.k):
        for j in range(g.k):
            tr = theorem_trace(g, i, j)
            assert tr is not None and tr.verified
            assert is_isomorphism(g, g, tr.pi) and edge_image(g, tr.pi, i) == j


def test_theorem_trace_c6_rotation():
    tr = theorem_trace(catalog.cycle(6), 0, 1)
    assert tr.verified


def test_theorem_trace_preconditions():
    with pytest.raises(PreconditionError):
        theorem_trace(catalog.path(4), 0, 1)
    with pytest.raises(PreconditionError):
        theorem_trace(catalog.star(3), 0, 1)
    with pytest.raises(PreconditionError):
        theorem_trace(catalog.complete(3), 0, 1)
    with pytest.raises(PreconditionError):
        theorem_trace(disjoint_union(catalog.cycle(4), catalog.cycle(4)), 0, 1)


def test_fingerprint_examples(p4_kernel):
    c4 = catalog.cycle(4)
    assert density_fingerprint_equal(c4, relabel(c4, [1, 3, 0, 2]))
    assert density_fingerprint_equal(c4, disjoint_union(c4, Graph(1)))
    assert not density_fingerprint_equal(catalog.path(4), delete_edge(catalog.path(4), 1))
    with pytest.raises(ValueError):
        density_fingerprint_equal(c4, c4, trials=0)


@given(graphs(max_n=7), st.randoms(use_true_random=False))
@settings(max_examples=30, deadline=None)
def test_fingerprint_one_sided(g, rnd):
    perm = list(range(g.n))
    rnd.shuffle(perm)
    assert density_fingerprint_equal(g, relabel(g, perm), trials=3)


@pytest.mark.parametrize("name", ["C4", "C6", "K_2_3", "K_3_3", "Q3", "K4", "C5", "torus_6_6"])
def test_connected_edge_deletion(name):
    g = catalog.build(name)
    assert is_connected(g) and min(g.degrees()) >= 2
    assert has_connected_edge_deletion(g)


@pytest.mark.parametrize("name", ["C4", "C6", "K_2_2", "K_3_3", "Q3", "star_3", "star_4", "torus_6_6"])
def test_edge_transitive_lemma_symmetry(name):
    from normcheck.density import edge_deleted_densities

    g = catalog.build(name)
    q = 2 if g.n > 16 else 3
    for seed in range(10):
        ts = edge_deleted_densities(g, random_graphon(q, 0, 1, seed))
        assert max(ts) - min(ts) <= 1e-10
