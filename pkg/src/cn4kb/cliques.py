"""Maximal cliques and k-clique percolation on the loop-free undirected graph."""

from __future__ import annotations

import heapq
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .errors import UsageError
from .graphs import InducedGraph
from .metrics import histogram


@dataclass
class CliqueSet:
    cliques: list  # sorted tuples, in lexicographic order

    def __len__(self) -> int:
        return len(self.cliques)

    def size_distribution(self, min_size: int = 1) -> dict[int, int]:
        return histogram([len(c) for c in self.cliques if len(c) >= min_size])

    def count(self, min_size: int = 1) -> int:
        return sum(1 for c in self.cliques if len(c) >= min_size)

    def largest(self) -> list:
        if not self.cliques:
            return []
        top = max(len(c) for c in self.cliques)
        return [c for c in self.cliques if len(c) == top]


def degeneracy_order(adj: list[set]) -> list[int]:
    """Repeatedly remove a vertex of minimum remaining degree (smallest id first)."""
    deg = [len(a) for a in adj]
    heap = [(d, v) for v, d in enumerate(deg)]
    heapq.heapify(heap)
    removed = [False] * len(adj)
    order = []
    while heap:
        d, v = heapq.heappop(heap)
        if removed[v] or d != deg[v]:
            continue
        removed[v] = True
        order.append(v)
        for u in adj[v]:
            if not removed[u]:
                deg[u] -= 1
                heapq.heappush(heap, (deg[u], u))
    return order


def _expand(adj, R, P, X, out):
    # Tomita pivot: the vertex of P | X with most neighbours in P
    stack = [(R, P, X)]
    while stack:
        R, P, X = stack.pop()
        if not P:
            if not X:
                out.append(tuple(sorted(R)))
            continue
        pivot = max(P | X, key=lambda u: (len(P & adj[u]), -u))
        for v in sorted(P - adj[pivot]):
            nv = adj[v]
            stack.append((R + [v], P & nv, X & nv))
            P = P - {v}
            X = X | {v}


def maximal_cliques(g: InducedGraph, min_size: int = 1) -> CliqueSet:
    """All maximal cliques (isolated vertices are cliques of size 1)."""
    adj = g.neighbor_sets()
    out: list = []
    order = degeneracy_order(adj)
    position = {v: i for i, v in enumerate(order)}
    for v in order:
        later = {u for u in adj[v] if position[u] > position[v]}
        earlier = adj[v] - later
        _expand(adj, [v], later, earlier, out)
    out = [c for c in out if len(c) >= min_size]
    out.sort()
    return CliqueSet(out)


@dataclass
class Cover:
    k: int
    communities: list  # sorted vertex tuples
    membership: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.communities)

    def size_distribution(self) -> dict[int, int]:
        return histogram([len(c) for c in self.communities])

    def membership_distribution(self, vertices=None) -> dict[int, int]:
        """Number of communities per vertex -> vertex count over ``vertices``."""
        m = self.membership if vertices is None else self.membership[vertices]
        return histogram(m)


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if ra < rb:
                self.parent[rb] = ra
            else:
                self.parent[ra] = rb


def k_clique_percolation(g: InducedGraph, k: int, cliques: CliqueSet | None = None) -> Cover:
    """Communities of k-cliques chained through shared (k-1)-cliques.

    Two maximal cliques of size >= k belong to the same community when they
    share at least k-1 vertices; every k-clique lies in some maximal clique,
    so this yields the same communities as chaining the k-cliques directly.
    """
    if k < 3:
        raise UsageError(f"clique percolation needs k >= 3, got {k}")
    if cliques is None:
        cliques = maximal_cliques(g, min_size=k)
    big = [c for c in cliques.cliques if len(c) >= k]
    uf = _UnionFind(len(big))
    containing: dict[int, list] = defaultdict(list)
    for i, c in enumerate(big):
        for v in c:
            containing[v].append(i)
    for i, c in enumerate(big):
        shared: dict[int, int] = defaultdict(int)
        for v in c:
            for j in containing[v]:
                if j > i:
                    shared[j] += 1
        for j, s in shared.items():
            if s >= k - 1:
                uf.union(i, j)
    groups: dict[int, set] = defaultdict(set)
    for i, c in enumerate(big):
        groups[uf.find(i)].update(c)
    communities = sorted(tuple(sorted(s)) for s in groups.values())
    membership = np.zeros(g.n, dtype=np.int64)
    for c in communities:
        membership[list(c)] += 1
    return Cover(k, communities, membership)
