"""Degree statistics, clustering, connected components, cores and paths."""

from __future__ import annotations

from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from . import kernels
from .errors import UndefinedError, UsageError
from .graphs import InducedGraph


def histogram(values) -> dict[int, int]:
    """Value -> count, sorted by value."""
    values = np.asarray(values, dtype=np.int64)
    if values.size == 0:
        return {}
    uniq, counts = np.unique(values, return_counts=True)
    return dict(zip(uniq.tolist(), counts.tolist()))


# --------------------------------------------------------------------------
# degrees


class TopVertex(NamedTuple):
    vertex: int
    name: str
    total: int
    in_degree: int
    out_degree: int


@dataclass
class DegreeStats:
    in_degree: np.ndarray
    out_degree: np.ndarray
    total: np.ndarray
    names: list | None = None

    def histogram(self, which: str = "total") -> dict[int, int]:
        arrays = {"total": self.total, "in": self.in_degree, "out": self.out_degree}
        if which not in arrays:
            raise UsageError(f"degree kind must be one of {sorted(arrays)}")
        return histogram(arrays[which])

    def top_k(self, k: int = 100) -> list[TopVertex]:
        order = np.lexsort((np.arange(len(self.total)), -self.total))[:k]
        return [TopVertex(int(v), self.names[v] if self.names else str(v), int(self.total[v]),
                          int(self.in_degree[v]), int(self.out_degree[v])) for v in order]


def degree_stats(g: InducedGraph) -> DegreeStats:
    """Multigraph degrees; a self-loop counts once as in and once as out."""
    return DegreeStats(g.in_degree.copy(), g.out_degree.copy(), g.total_degree, g.names)


def degree_histogram(g: InducedGraph, which: str = "total") -> dict[int, int]:
    return degree_stats(g).histogram(which)


def average_degree(g: InducedGraph, view: str = "multi", exclude_isolated: bool = False) -> float:
    """2|E|/|V| for the multigraph, directed or undirected edge set."""
    if view == "multi":
        m = g.n_multi
    elif view == "directed":
        m = len(g.directed)
    elif view == "undirected":
        m = len(g.undirected)
    else:
        raise UsageError(f"unknown view {view!r}")
    nv = g.n - g.n_isolated if exclude_isolated else g.n
    if nv == 0:
        raise UndefinedError("average degree of a graph without vertices")
    return 2.0 * m / nv


# --------------------------------------------------------------------------
# clustering


def _simple_degree_and_triangles(g: InducedGraph) -> tuple[np.ndarray, np.ndarray]:
    indptr, idx = g.und_adj
    deg = np.diff(indptr)
    tri = kernels.triangle_counts(indptr, idx, g.n)
    return deg, tri


def transitivity_global(g: InducedGraph) -> float:
    """Closed over connected triples in the loop-free undirected graph."""
    deg, tri = _simple_degree_and_triangles(g)
    triples = int(np.sum(deg * (deg - 1) // 2))
    if triples == 0:
        raise UndefinedError("no connected triples")
    return float(tri.sum()) / triples


def local_clustering(g: InducedGraph) -> np.ndarray:
    """Per-vertex coefficient; NaN where the degree is below 2."""
    deg, tri = _simple_degree_and_triangles(g)
    pairs = deg * (deg - 1) / 2.0
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(deg >= 2, tri / np.where(pairs > 0, pairs, 1), np.nan)


def clustering_avg(g: InducedGraph, mode: str = "nan") -> float:
    c = local_clustering(g)
    if mode == "nan":
        ok = ~np.isnan(c)
        if not ok.any():
            raise UndefinedError("no vertex has degree 2 or more")
        return float(c[ok].mean())
    if mode == "zero":
        if g.n == 0:
            raise UndefinedError("empty graph")
        return float(np.nan_to_num(c, nan=0.0).mean())
    raise UsageError(f"clustering mode must be 'nan' or 'zero', got {mode!r}")


# --------------------------------------------------------------------------
# components


def _first_occurrence_labels(labels: np.ndarray) -> np.ndarray:
    """Renumber so that component ids increase with their smallest vertex."""
    if len(labels) == 0:
        return labels.astype(np.int64)
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first, kind="stable")
    remap = np.empty(len(order), dtype=np.int64)
    remap[order] = np.arange(len(order))
    uniq = np.unique(labels)
    return remap[np.searchsorted(uniq, labels)]


@dataclass
class Components:
    labels: np.ndarray
    sizes: np.ndarray = field(init=False)

    def __post_init__(self):
        self.sizes = np.bincount(self.labels).astype(np.int64) if len(self.labels) else \
            np.zeros(0, dtype=np.int64)

    @property
    def count(self) -> int:
        return len(self.sizes)

    @property
    def largest(self) -> int:
        return int(self.sizes.max()) if len(self.sizes) else 0

    def size_distribution(self) -> dict[int, int]:
        """Component size -> number of components, largest size first."""
        return dict(sorted(histogram(self.sizes).items(), reverse=True))


def weak_components(g: InducedGraph) -> Components:
    indptr, idx = g.out_adj
    mat = csr_matrix((np.ones(len(idx), dtype=np.int8), idx, indptr), shape=(g.n, g.n))
    _, labels = connected_components(mat, directed=True, connection="weak")
    return Components(_first_occurrence_labels(labels))


def strong_components(g: InducedGraph) -> Components:
    indptr, idx = g.out_adj
    return Components(_first_occurrence_labels(kernels.tarjan_scc(indptr, idx, g.n)))


# --------------------------------------------------------------------------
# cores


class CoreLevel(NamedTuple):
    k: int
    vertices: int
    multi_edges: int
    directed_edges: int
    undirected_edges: int
    avg_degree_multi: float
    avg_degree_directed: float
    avg_degree_undirected: float


@dataclass
class CoreFiltration:
    coreness: np.ndarray
    levels: list

    def histogram(self) -> dict[int, int]:
        return histogram(self.coreness)

    @property
    def max_coreness(self) -> int:
        return int(self.coreness.max()) if len(self.coreness) else 0


def core_numbers(g: InducedGraph) -> np.ndarray:
    """Coreness in the undirected graph; a self-loop present in ``g`` adds 2."""
    indptr, idx = g.und_adj
    extra = np.zeros(g.n, dtype=np.int64)
    extra[g.loop_vertices] = 2
    return kernels.core_numbers(indptr, idx, g.n, extra)


def coreness(g: InducedGraph) -> CoreFiltration:
    core = core_numbers(g)
    levels = []
    u, d = g.undirected, g.directed
    for k in range(0, (int(core.max()) if g.n else 0) + 1):
        inside = core >= k
        nv = int(inside.sum())
        m = int(np.count_nonzero(inside[g.src] & inside[g.dst]))
        md = int(np.count_nonzero(inside[d.src] & inside[d.dst]))
        mu = int(np.count_nonzero(inside[u.src] & inside[u.dst]))

        def avg(e):
            return 2.0 * e / nv if nv else 0.0

        levels.append(CoreLevel(k, nv, m, md, mu, avg(m), avg(md), avg(mu)))
    return CoreFiltration(core, levels)


# --------------------------------------------------------------------------
# shortest paths


@dataclass
class PathLengthHistogram:
    counts: dict  # length -> pair count
    unreachable: int
    directed: bool
    n: int
    longest: int = 0
    longest_pair: tuple = (-1, -1)

    @property
    def total_pairs(self) -> int:
        return self.n * (self.n - 1) if self.directed else self.n * (self.n - 1) // 2

    @property
    def finite_pairs(self) -> int:
        return sum(self.counts.values())

    def average(self) -> float:
        f = self.finite_pairs
        if f == 0:
            raise UndefinedError("no pair of distinct vertices is connected")
        return sum(k * c for k, c in self.counts.items()) / f

    def rows(self) -> list[tuple[str, int]]:
        out = [(str(k), c) for k, c in sorted(self.counts.items())]
        out.append(("inf", self.unreachable))
        return out


def _chunks(n: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, n)) if n else 1
    bounds = np.linspace(0, n, parts + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:])]


def path_length_histogram(g: InducedGraph, directed: bool = True,
                          threads: int = 1) -> PathLengthHistogram:
    """Distances between all pairs by one BFS per source.

    Sources are split into contiguous chunks; merging the partial results in
    chunk order keeps the output independent of the thread count.
    """
    indptr, idx = g.out_adj if directed else g.und_adj
    chunks = _chunks(g.n, threads)

    def run(chunk):
        return kernels.bfs_histogram(indptr, idx, g.n, chunk[0], chunk[1])

    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, chunks))
    else:
        parts = [run(c) for c in chunks]
    hist = np.zeros(max(g.n, 1), dtype=np.int64)
    best = (0, -1, -1)
    for h, length, s, t in parts:
        hist += h
        if length > best[0]:
            best = (length, s, t)
    if not directed:
        hist //= 2
        if best[1] > best[2]:
            best = (best[0], best[2], best[1])
    counts = {int(k): int(c) for k, c in enumerate(hist) if c}
    res = PathLengthHistogram(counts, 0, directed, g.n, best[0], (best[1], best[2]))
    res.unreachable = res.total_pairs - res.finite_pairs
    return res


def average_path_length(g: InducedGraph, directed: bool = True, threads: int = 1) -> float:
    return path_length_histogram(g, directed, threads).average()


def shortest_path(g: InducedGraph, source: int, target: int, directed: bool = True) -> list[int]:
    indptr, idx = g.out_adj if directed else g.und_adj
    parent = {source: -1}
    q = deque([source])
    while q:
        u = q.popleft()
        if u == target:
            break
        for v in idx[indptr[u]:indptr[u + 1]].tolist():
            if v not in parent:
                parent[v] = u
                q.append(v)
    if target not in parent:
        return []
    path = [target]
    while parent[path[-1]] != -1:
        path.append(parent[path[-1]])
    return path[::-1]


class Geodesic(NamedTuple):
    length: int
    path: list


def longest_geodesic(g: InducedGraph, directed: bool = True, threads: int = 1,
                     hist: PathLengthHistogram | None = None) -> Geodesic:
    """Longest finite shortest path; ties go to the smallest (source, target)."""
    if hist is None:
        hist = path_length_histogram(g, directed, threads)
    if hist.longest == 0:
        raise UndefinedError("graph has no edges between distinct vertices")
    s, t = hist.longest_pair
    return Geodesic(hist.longest, shortest_path(g, s, t, directed))

