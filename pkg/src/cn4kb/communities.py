"""Modularity and two seeded partitioning heuristics.

Randomness comes from numpy's PCG64 generator.  ``run_stats`` derives one
independent stream per run with ``SeedSequence.spawn`` so that a batch of
runs is reproducible from a single seed whatever the thread count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import UndefinedError, UsageError
from .graphs import InducedGraph


def dense_labels(labels) -> np.ndarray:
    """Relabel to 0..k-1 in order of first appearance."""
    out = np.empty(len(labels), dtype=np.int64)
    seen: dict = {}
    for i, lab in enumerate(np.asarray(labels).tolist()):
        out[i] = seen.setdefault(lab, len(seen))
    return out


def modularity(g: InducedGraph, partition) -> float:
    """Newman-Girvan modularity of the loop-free simple undirected graph."""
    membership = np.asarray(getattr(partition, "membership", partition), dtype=np.int64)
    if len(membership) != g.n:
        raise UsageError("partition does not cover every vertex")
    s, t = g.simple_edges
    m = len(s)
    if m == 0:
        raise UndefinedError("modularity of a graph without edges")
    deg = np.bincount(np.r_[s, t], minlength=g.n).astype(np.float64)
    k = int(membership.max()) + 1 if len(membership) else 0
    internal = np.bincount(membership[s][membership[s] == membership[t]], minlength=k)
    strength = np.bincount(membership, weights=deg, minlength=k)
    return float(np.sum(internal / m - (strength / (2.0 * m)) ** 2))


@dataclass
class Partition:
    membership: np.ndarray
    mu: float

    @property
    def kappa(self) -> int:
        return int(self.membership.max()) + 1 if len(self.membership) else 0

    def communities(self) -> list[list[int]]:
        groups: list[list[int]] = [[] for _ in range(self.kappa)]
        for v, c in enumerate(self.membership.tolist()):
            groups[c].append(v)
        return groups


def _partition(g: InducedGraph, labels) -> Partition:
    membership = dense_labels(labels)
    try:
        mu = modularity(g, membership)
    except UndefinedError:
        mu = float("nan")
    return Partition(membership, mu)


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def dominant_labels(neighbors, labels) -> list:
    counts: dict = {}
    for u in neighbors:
        lab = labels[u]
        counts[lab] = counts.get(lab, 0) + 1
    if not counts:
        return []
    top = max(counts.values())
    return sorted(lab for lab, c in counts.items() if c == top)


def label_propagation(g: InducedGraph, seed=0) -> Partition:
    """Asynchronous label propagation.

    Each sweep visits the vertices in a fresh random order.  A vertex keeps
    its label while that label is among the most frequent around it and
    otherwise takes one of the most frequent labels uniformly at random.
    The loop stops after a sweep without changes, so every vertex ends with
    a dominant label of its neighbourhood.
    """
    rng = _rng(seed)
    indptr, idx = g.und_adj
    nbrs = [idx[indptr[v]:indptr[v + 1]].tolist() for v in range(g.n)]
    labels = list(range(g.n))
    changed = True
    while changed:
        changed = False
        for v in rng.permutation(g.n).tolist():
            best = dominant_labels(nbrs[v], labels)
            if not best or labels[v] in best:
                continue
            labels[v] = best[int(rng.integers(len(best)))]
            changed = True
    return _partition(g, labels)


# --------------------------------------------------------------------------
# multilevel modularity optimisation


def _one_level(adj: list[dict], strength: list[float], two_m: float,
               rng: np.random.Generator) -> tuple[list[int], bool]:
    n = len(adj)
    comm = list(range(n))
    tot = list(strength)
    moved_any = False
    improved = True
    while improved:
        improved = False
        for v in rng.permutation(n).tolist():
            cv = comm[v]
            kv = strength[v]
            links: dict[int, float] = {}
            for u, w in adj[v].items():
                if u != v:
                    links[comm[u]] = links.get(comm[u], 0.0) + w
            tot[cv] -= kv
            best_c = cv
            best_gain = links.get(cv, 0.0) - tot[cv] * kv / two_m
            for c in sorted(links):
                gain = links[c] - tot[c] * kv / two_m
                if gain > best_gain + 1e-12:
                    best_gain, best_c = gain, c
            tot[best_c] += kv
            if best_c != cv:
                comm[v] = best_c
                improved = True
                moved_any = True
    return comm, moved_any


def multilevel(g: InducedGraph, seed=0) -> Partition:
    """Greedy local moves in random order followed by aggregation, repeated."""
    rng = _rng(seed)
    s, t = g.simple_edges
    if len(s) == 0:
        return _partition(g, np.arange(g.n))
    adj: list[dict] = [dict() for _ in range(g.n)]
    for a, b in zip(s.tolist(), t.tolist()):
        adj[a][b] = adj[a].get(b, 0.0) + 1.0
        adj[b][a] = adj[b].get(a, 0.0) + 1.0
    membership = np.arange(g.n)
    while True:
        strength = [sum(d.values()) for d in adj]
        two_m = sum(strength)
        comm, moved = _one_level(adj, strength, two_m, rng)
        if not moved:
            break
        dense = dense_labels(comm)
        membership = dense[membership]
        k = int(dense.max()) + 1
        new_adj: list[dict] = [dict() for _ in range(k)]
        for v, d in enumerate(adj):
            cv = dense[v]
            for u, w in d.items():
                cu = dense[u]
                new_adj[cv][cu] = new_adj[cv].get(cu, 0.0) + w
        adj = new_adj
    return _partition(g, membership)


ALGORITHMS: dict[str, Callable] = {"lp": label_propagation, "multilevel": multilevel}


@dataclass
class RunStats:
    algorithm: str
    runs: int
    seed: int
    kappa_avg: float
    kappa_min: int
    kappa_max: int
    mu_avg: float
    mu_min: float
    mu_max: float
    partitions: list


def run_stats(algorithm: str, g: InducedGraph, runs: int = 1, seed: int = 0,
              threads: int = 1) -> RunStats:
    if algorithm not in ALGORITHMS:
        raise UsageError(f"unknown algorithm {algorithm!r}; choose from {sorted(ALGORITHMS)}")
    if runs < 1:
        raise UsageError("runs must be at least 1")
    fn = ALGORITHMS[algorithm]
    children = np.random.SeedSequence(seed).spawn(runs)

    def one(child):
        return fn(g, np.random.default_rng(child))

    if threads > 1 and runs > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(one, children))
    else:
        parts = [one(c) for c in children]
    kap = np.array([p.kappa for p in parts])
    mus = np.array([p.mu for p in parts])
    return RunStats(algorithm, runs, seed, float(kap.mean()), int(kap.min()), int(kap.max()),
                    float(mus.mean()), float(mus.min()), float(mus.max()), parts)
