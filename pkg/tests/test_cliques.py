import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from cn4kb import cliques
from cn4kb.errors import UsageError
from cn4kb.graphs import InducedGraph


def graph(n, edges):
    return InducedGraph.from_edges(n, edges)


def test_k4_is_one_clique():
    g = graph(4, list(itertools.combinations(range(4), 2)))
    cs = cliques.maximal_cliques(g)
    assert cs.cliques == [(0, 1, 2, 3)] and cs.size_distribution() == {4: 1}


def test_loops_and_isolated_vertices():
    cs = cliques.maximal_cliques(graph(4, [(0, 0), (1, 2), (2, 1)]))
    assert cs.cliques == [(0,), (1, 2), (3,)]
    assert cs.count(min_size=2) == 1 and cs.largest() == [(1, 2)]


@pytest.mark.parametrize("seed", range(8))
def test_maximal_cliques_brute_force(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(5, 16))
    edges = oracles.random_edges(rng, n, float(rng.uniform(0.2, 0.7)), directed=True, loops=True)
    assert cliques.maximal_cliques(graph(n, edges)).cliques == oracles.brute_maximal_cliques(n, edges)


def test_degeneracy_order_is_a_permutation():
    adj = oracles.simple_adj(6, [(0, 1), (1, 2), (2, 0), (3, 4)])
    order = cliques.degeneracy_order(adj)
    assert sorted(order) == list(range(6)) and order[0] == 5


def test_two_triangles_sharing_an_edge():
    g = graph(4, [(0, 1), (1, 2), (2, 0), (1, 3), (2, 3)])
    cover = cliques.k_clique_percolation(g, 3)
    assert cover.communities == [(0, 1, 2, 3)]
    assert len(cliques.k_clique_percolation(g, 4)) == 0


def test_triangles_sharing_a_vertex_stay_apart():
    g = graph(5, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)])
    cover = cliques.k_clique_percolation(g, 3)
    assert cover.communities == [(0, 1, 2), (2, 3, 4)]
    assert cover.membership.tolist() == [1, 1, 2, 1, 1]
    assert cover.membership_distribution() == {1: 4, 2: 1}
    assert cover.size_distribution() == {3: 2}


@pytest.mark.parametrize("k", [0, 1, 2])
def test_small_k_rejected(k):
    with pytest.raises(UsageError):
        cliques.k_clique_percolation(graph(3, [(0, 1)]), k)


@pytest.mark.parametrize("seed", range(8))
@pytest.mark.parametrize("k", [3, 4])
def test_percolation_brute_force(seed, k):
    rng = np.random.default_rng(50 + seed)
    n = int(rng.integers(6, 13))
    edges = oracles.random_edges(rng, n, float(rng.uniform(0.3, 0.7)))
    got = cliques.k_clique_percolation(graph(n, edges), k).communities
    assert got == oracles.brute_percolation(n, edges, k)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 11), st.lists(st.tuples(st.integers(0, 10), st.integers(0, 10)), max_size=40))
def test_cliques_random(n, raw):
    edges = [(u % n, v % n) for u, v in raw]
    cs = cliques.maximal_cliques(graph(n, edges))
    assert cs.cliques == oracles.brute_maximal_cliques(n, edges)
    covered = {v for c in cs.cliques for v in c}
    assert covered == set(range(n))
