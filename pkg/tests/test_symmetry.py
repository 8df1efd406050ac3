import itertools
import math
import time

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import graphs
from normcheck import catalog
from normcheck.graphs import Graph, delete_edge, disjoint_union, relabel
from normcheck.symmetry import (
    GroupTooLarge,
    _edge_orbits_pinned,
    automorphism_group,
    components_isomorphic,
    edge_image,
    edge_orbits,
    find_isomorphism,
    is_edge_transitive,
    is_isomorphism,
)


def brute_automorphisms(g):
    return [p for p in itertools.permutations(range(g.n)) if is_isomorphism(g, g, p)]


@pytest.mark.parametrize(
    "name,order",
    [("P4", 2), ("C4", 8), ("star_3", 6), ("K_3_3", 72), ("Q3", 48), ("C6", 12), ("K4", 24)],
)
def test_automorphism_group_order(name, order):
    group = automorphism_group(catalog.build(name))
    assert len(group) == order
    assert len(set(group)) == order
    assert group[0] == tuple(range(catalog.build(name).n))


@pytest.mark.parametrize("name", ["P4", "C4", "star_3", "C5", "K_2_3"])
def test_automorphisms_match_brute_force(name):
    g = catalog.build(name)
    assert sorted(automorphism_group(g)) == brute_automorphisms(g)


@given(graphs(max_n=6))
@settings(max_examples=40, deadline=None)
def test_group_matches_brute_force_random(g):
    assert sorted(automorphism_group(g)) == brute_automorphisms(g)


def test_isomorphism_examples():
    c4 = catalog.cycle(4)
    perm = [2, 0, 3, 1]
    pi = find_isomorphism(c4, relabel(c4, perm))
    assert pi is not None and is_isomorphism(c4, relabel(c4, perm), pi)
    assert find_isomorphism(catalog.path(4), delete_edge(catalog.path(4), 1)) is None
    c3c3 = disjoint_union(catalog.cycle(3), catalog.cycle(3))
    assert find_isomorphism(catalog.cycle(6), c3c3) is None
    assert not any(is_isomorphism(catalog.cycle(6), c3c3, p) for p in itertools.permutations(range(6)))


@given(graphs(max_n=8), st.randoms(use_true_random=False))
@settings(max_examples=60, deadline=None)
def test_relabelled_graph_is_isomorphic(g, rnd):
    perm = list(range(g.n))
    rnd.shuffle(perm)
    h = relabel(g, perm)
    pi = find_isomorphism(g, h)
    assert pi is not None and is_isomorphism(g, h, pi)


@given(graphs(max_n=7))
@settings(max_examples=40, deadline=None)
def test_group_order_divides_factorial(g):
    assert math.factorial(g.n) % len(automorphism_group(g)) == 0


@pytest.mark.parametrize("name", ["C5", "C6", "K_3_3", "Q3", "K4", "torus_4_4"])
def test_vertex_transitive_order_divisible_by_n(name):
    g = catalog.build(name)
    assert len(automorphism_group(g)) % g.n == 0


def test_edge_orbits_p4():
    orb = edge_orbits(catalog.path(4))
    assert sorted(orb.orbits) == [(0, 2), (1,)]
    assert not is_edge_transitive(catalog.path(4))


@pytest.mark.parametrize("name", ["C4", "C6", "K_3_3", "Q3", "star_3", "torus_6_6"])
def test_single_orbit_fixtures(name):
    t0 = time.perf_counter()
    assert len(edge_orbits(catalog.build(name)).orbits) == 1
    assert time.perf_counter() - t0 < 5


def test_witnesses_are_automorphisms_mapping_edges():
    g = catalog.build("Q3")
    orb = edge_orbits(g)
    for l1, l2 in [(0, 5), (3, 11), (7, 7)]:
        pi = orb.witness(l1, l2)
        assert is_isomorphism(g, g, pi)
        assert edge_image(g, pi, l1) == l2


def test_witness_rejects_cross_orbit_pairs():
    with pytest.raises(ValueError):
        edge_orbits(catalog.path(4)).witness(0, 1)


def test_pinned_fallback_agrees():
    for name in ["P4", "C6", "K_2_3", "Q3"]:
        g = catalog.build(name)
        assert sorted(map(sorted, _edge_orbits_pinned(g).orbits)) == sorted(map(sorted, edge_orbits(g).orbits))
    g = catalog.build("Q3")
    orb = edge_orbits(g, cap=10)
    assert orb.method == "pinned" and len(orb.orbits) == 1


def test_group_cap():
    with pytest.raises(GroupTooLarge):
        automorphism_group(catalog.build("Q3"), cap=10)


@given(graphs(max_n=7), st.randoms(use_true_random=False))
@settings(max_examples=40, deadline=None)
def test_orbit_sizes_relabel_invariant(g, rnd):
    perm = list(range(g.n))
    rnd.shuffle(perm)
    sizes = sorted(len(o) for o in edge_orbits(g).orbits)
    assert sizes == sorted(len(o) for o in edge_orbits(relabel(g, perm)).orbits)


def test_edge_transitive_conventions():
    assert is_edge_transitive(Graph(3))
    assert is_edge_transitive(catalog.star(3))
    assert is_edge_transitive(catalog.complete_bipartite(3, 3))


def test_components_isomorphic_examples():
    c4 = catalog.cycle(4)
    res = components_isomorphic(disjoint_union(c4, c4, Graph(1)))
    assert res.ok and len(res.components) == 2 and res.singletons == (8,)
    w = res.witnesses[1]
    g = disjoint_union(c4, c4, Graph(1))
    assert all(g.has_edge(w[u], w[v]) for u, v in c4.edges)
    assert not components_isomorphic(disjoint_union(c4, catalog.cycle(6))).ok
    c3c3 = disjoint_union(catalog.cycle(3), catalog.cycle(3))
    assert not components_isomorphic(disjoint_union(catalog.cycle(6), c3c3)).ok
