import os
import subprocess
import sys

import numpy as np
import pytest

import oracles
from cn4kb import _fallback, kernels
from cn4kb.graphs import InducedGraph

compiled = pytest.importorskip("cn4kb._kernels")


def random_graph(seed, n=120, p=0.03):
    rng = np.random.default_rng(seed)
    return InducedGraph.from_edges(n, oracles.random_edges(rng, n, p, directed=True, loops=True))


@pytest.mark.parametrize("seed", range(6))
def test_bfs_parity(seed):
    g = random_graph(seed)
    for indptr, idx in (g.out_adj, g.und_adj):
        for start, stop in [(0, g.n), (10, 47), (g.n, g.n)]:
            a = compiled.bfs_histogram(indptr, idx, g.n, start, stop)
            b = _fallback.bfs_histogram(indptr, idx, g.n, start, stop)
            assert np.array_equal(a[0], b[0]) and tuple(a[1:]) == tuple(b[1:])


@pytest.mark.parametrize("seed", range(6))
def test_core_and_triangle_parity(seed):
    g = random_graph(seed, p=0.08)
    indptr, idx = g.und_adj
    extra = np.zeros(g.n, dtype=np.int64)
    extra[g.loop_vertices] = 2
    assert np.array_equal(compiled.core_numbers(indptr, idx, g.n, extra),
                          _fallback.core_numbers(indptr, idx, g.n, extra))
    assert np.array_equal(compiled.triangle_counts(indptr, idx, g.n),
                          _fallback.triangle_counts(indptr, idx, g.n))


@pytest.mark.parametrize("seed", range(6))
def test_scc_parity(seed):
    g = random_graph(seed, n=300, p=0.006)
    indptr, idx = g.out_adj
    a = compiled.tarjan_scc(indptr, idx, g.n)
    b = _fallback.tarjan_scc(indptr, idx, g.n)
    assert np.array_equal(a, b)


def test_empty_graph_parity():
    indptr, idx = np.zeros(1, dtype=np.int64), np.zeros(0, dtype=np.int64)
    for mod in (compiled, _fallback):
        assert len(mod.tarjan_scc(indptr, idx, 0)) == 0
        assert len(mod.core_numbers(indptr, idx, 0, np.zeros(0, dtype=np.int64))) == 0


def test_deep_chain_does_not_recurse():
    n = 200_000
    g = InducedGraph.from_edges(n, [(i, i + 1) for i in range(n - 1)] + [(n - 1, 0)])
    indptr, idx = g.out_adj
    for mod in (compiled, _fallback):
        assert len(np.unique(mod.tarjan_scc(indptr, idx, n))) == 1


def test_environment_forces_fallback():
    code = "from cn4kb import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, CN4KB_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "python"
    assert kernels.BACKEND == ("python" if os.environ.get("CN4KB_PURE_PYTHON") else "compiled")
