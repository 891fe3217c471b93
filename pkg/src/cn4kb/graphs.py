"""Graphs induced by filtered assertion sets.

The vertices are always the concepts that occur in the assertions, i.e. the
indices ``0 .. n_input - 1`` of the closed concept table.  An induced graph
keeps three views of the same edge set:

* the multigraph, one edge per passing assertion;
* the directed graph, one edge per ordered concept pair;
* the undirected graph, one edge per unordered pair (smaller index first).

The collapsed views keep the assertion indices behind each edge.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, NamedTuple

import numpy as np

from .closure import ClosedKB
from .errors import UsageError

SCORE_FILTERS = ("all", "positive")
LOOP_MODES = ("keep", "drop")
POLARITIES = ("negative", "positive", "both")


@dataclass(frozen=True)
class GraphSpec:
    score: str = "positive"
    loops: str = "keep"
    polarity: str = "both"
    freq_lo: int = -10
    freq_hi: int = 10
    relations: frozenset | None = None

    def __post_init__(self):
        if self.score not in SCORE_FILTERS:
            raise UsageError(f"score filter must be one of {SCORE_FILTERS}, got {self.score!r}")
        if self.loops not in LOOP_MODES:
            raise UsageError(f"loops must be one of {LOOP_MODES}, got {self.loops!r}")
        if self.polarity not in POLARITIES:
            raise UsageError(f"polarity must be one of {POLARITIES}, got {self.polarity!r}")
        if not -10 <= self.freq_lo <= self.freq_hi <= 10:
            raise UsageError(
                f"frequency range {self.freq_lo}..{self.freq_hi} is empty or outside [-10, 10]")
        if self.relations is not None and not isinstance(self.relations, frozenset):
            object.__setattr__(self, "relations", frozenset(self.relations))

    def replace(self, **kw) -> "GraphSpec":
        fields = dict(score=self.score, loops=self.loops, polarity=self.polarity,
                      freq_lo=self.freq_lo, freq_hi=self.freq_hi, relations=self.relations)
        fields.update(kw)
        return GraphSpec(**fields)


class Collapsed(NamedTuple):
    """Distinct endpoint pairs with the assertions behind each, CSR style."""

    src: np.ndarray
    dst: np.ndarray
    offsets: np.ndarray  # labels[offsets[e]:offsets[e+1]] belong to edge e
    labels: np.ndarray

    def __len__(self) -> int:
        return len(self.src)

    def labels_of(self, e: int) -> np.ndarray:
        return self.labels[self.offsets[e]:self.offsets[e + 1]]


def _collapse(src: np.ndarray, dst: np.ndarray, label: np.ndarray, n: int) -> Collapsed:
    if len(src) == 0:
        z = np.zeros(0, dtype=np.int64)
        return Collapsed(z, z, np.zeros(1, dtype=np.int64), z)
    key = src * np.int64(max(n, 1)) + dst
    order = np.lexsort((label, key))
    key_sorted = key[order]
    starts = np.flatnonzero(np.r_[True, key_sorted[1:] != key_sorted[:-1]])
    offsets = np.r_[starts, len(key_sorted)].astype(np.int64)
    first = order[starts]
    return Collapsed(src[first].copy(), dst[first].copy(), offsets, label[order].copy())


def _csr(n: int, src: np.ndarray, dst: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.lexsort((dst, src))
    counts = np.bincount(src, minlength=n) if len(src) else np.zeros(n, dtype=np.int64)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, dst[order].astype(np.int64)


class InducedGraph:
    """Immutable edge views over ``n`` vertices."""

    def __init__(self, n: int, src, dst, label=None, names: list[str] | None = None):
        self.n = int(n)
        self.src = np.asarray(src, dtype=np.int64)
        self.dst = np.asarray(dst, dtype=np.int64)
        if label is None:
            label = np.arange(len(self.src), dtype=np.int64)
        self.label = np.asarray(label, dtype=np.int64)
        if len(self.src) != len(self.dst) or len(self.src) != len(self.label):
            raise ValueError("edge arrays differ in length")
        if len(self.src) and (min(self.src.min(), self.dst.min()) < 0
                              or max(self.src.max(), self.dst.max()) >= self.n):
            raise ValueError("edge endpoint outside the vertex range")
        self.names = names

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], names=None) -> "InducedGraph":
        e = np.array(list(edges), dtype=np.int64).reshape(-1, 2)
        return cls(n, e[:, 0], e[:, 1], names=names)

    def name(self, v: int) -> str:
        return self.names[v] if self.names is not None else str(v)

    @property
    def n_multi(self) -> int:
        return len(self.src)

    @property
    def n_loops(self) -> int:
        return int(np.count_nonzero(self.src == self.dst))

    @cached_property
    def directed(self) -> Collapsed:
        return _collapse(self.src, self.dst, self.label, self.n)

    @cached_property
    def undirected(self) -> Collapsed:
        lo = np.minimum(self.src, self.dst)
        hi = np.maximum(self.src, self.dst)
        return _collapse(lo, hi, self.label, self.n)

    @cached_property
    def out_degree(self) -> np.ndarray:
        return np.bincount(self.src, minlength=self.n).astype(np.int64)

    @cached_property
    def in_degree(self) -> np.ndarray:
        return np.bincount(self.dst, minlength=self.n).astype(np.int64)

    @property
    def total_degree(self) -> np.ndarray:
        """Multigraph degree; a self-loop adds 2."""
        return self.out_degree + self.in_degree

    @cached_property
    def isolated(self) -> np.ndarray:
        return self.total_degree == 0

    @property
    def n_isolated(self) -> int:
        return int(np.count_nonzero(self.isolated))

    # simple adjacency, loops removed -----------------------------------

    @cached_property
    def out_adj(self) -> tuple[np.ndarray, np.ndarray]:
        d = self.directed
        keep = d.src != d.dst
        return _csr(self.n, d.src[keep], d.dst[keep])

    @cached_property
    def in_adj(self) -> tuple[np.ndarray, np.ndarray]:
        d = self.directed
        keep = d.src != d.dst
        return _csr(self.n, d.dst[keep], d.src[keep])

    @cached_property
    def und_adj(self) -> tuple[np.ndarray, np.ndarray]:
        u = self.undirected
        keep = u.src != u.dst
        s, t = u.src[keep], u.dst[keep]
        return _csr(self.n, np.r_[s, t], np.r_[t, s])

    @cached_property
    def simple_edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Undirected loop-free pairs (u < v)."""
        u = self.undirected
        keep = u.src != u.dst
        return u.src[keep], u.dst[keep]

    @property
    def loop_vertices(self) -> np.ndarray:
        u = self.undirected
        return u.src[u.src == u.dst]

    def neighbor_sets(self) -> list[set]:
        indptr, idx = self.und_adj
        return [set(idx[indptr[v]:indptr[v + 1]].tolist()) for v in range(self.n)]

    def subgraph(self, keep: np.ndarray) -> tuple["InducedGraph", np.ndarray]:
        """Induced subgraph on the vertices with ``keep`` true, relabelled densely.

        Returns the subgraph and the original index of each new vertex.
        """
        keep = np.asarray(keep, dtype=bool)
        old = np.flatnonzero(keep)
        new_of = np.full(self.n, -1, dtype=np.int64)
        new_of[old] = np.arange(len(old))
        mask = keep[self.src] & keep[self.dst]
        names = [self.names[i] for i in old] if self.names is not None else None
        g = InducedGraph(len(old), new_of[self.src[mask]], new_of[self.dst[mask]],
                         self.label[mask], names)
        return g, old


def passing_mask(kb: ClosedKB, spec: GraphSpec) -> np.ndarray:
    n = len(kb.assertions)
    score = np.fromiter((a.score for a in kb.assertions), dtype=np.int64, count=n)
    rel = np.fromiter((a.relation for a in kb.assertions), dtype=np.int64, count=n)
    c1 = np.fromiter((a.concept1 for a in kb.assertions), dtype=np.int64, count=n)
    c2 = np.fromiter((a.concept2 for a in kb.assertions), dtype=np.int64, count=n)
    value = kb.frequency_values()
    mask = np.ones(n, dtype=bool)
    if spec.score == "positive":
        mask &= score > 0
    mask &= (value >= spec.freq_lo) & (value <= spec.freq_hi)
    # a frequency value of 0 counts as negative, like a non-positive score
    if spec.polarity == "negative":
        mask &= value <= 0
    elif spec.polarity == "positive":
        mask &= value > 0
    if spec.relations is not None:
        mask &= np.isin(rel, np.fromiter(spec.relations, dtype=np.int64))
    if spec.loops == "drop":
        mask &= c1 != c2
    return mask


def induce(kb: ClosedKB, spec: GraphSpec = GraphSpec()) -> InducedGraph:
    mask = passing_mask(kb, spec)
    idx = np.flatnonzero(mask)
    c1 = np.fromiter((kb.assertions[i].concept1 for i in idx), dtype=np.int64, count=len(idx))
    c2 = np.fromiter((kb.assertions[i].concept2 for i in idx), dtype=np.int64, count=len(idx))
    n = kb.n_input_concepts
    names = [c.text for c in kb.concepts[:n]]
    return InducedGraph(n, c1, c2, idx.astype(np.int64), names)


class EdgeCounts(NamedTuple):
    multi: int
    directed: int
    undirected: int
    isolated: int


def edge_counts(g: InducedGraph) -> EdgeCounts:
    return EdgeCounts(g.n_multi, len(g.directed), len(g.undirected), g.n_isolated)


def edge_table(kb: ClosedKB) -> list[tuple[str, str, str, EdgeCounts]]:
    """Edge and isolated-vertex counts for every score x loops x polarity cell."""
    rows = []
    for score in SCORE_FILTERS:
        for loops in LOOP_MODES:
            for polarity in POLARITIES:
                g = induce(kb, GraphSpec(score=score, loops=loops, polarity=polarity))
                rows.append((score, loops, polarity, edge_counts(g)))
    return rows


class RelationRow(NamedTuple):
    relation: int
    name: str
    edges: int
    edges_negative: int
    edges_positive: int
    loops: int
    loops_negative: int
    loops_positive: int


def decompose_by_relation(kb: ClosedKB, score_filter: str = "positive") -> list[RelationRow]:
    if score_filter not in SCORE_FILTERS:
        raise UsageError(f"score filter must be one of {SCORE_FILTERS}")
    n_rel = len(kb.relations)
    counts = np.zeros((n_rel, 6), dtype=np.int64)
    values = kb.frequency_values()
    for i, a in enumerate(kb.assertions):
        if score_filter == "positive" and a.score <= 0:
            continue
        pos = values[i] > 0
        counts[a.relation, 1 + pos] += 1
        if a.concept1 == a.concept2:
            counts[a.relation, 4 + pos] += 1
    counts[:, 0] = counts[:, 1] + counts[:, 2]
    counts[:, 3] = counts[:, 4] + counts[:, 5]
    return [RelationRow(r, kb.relations[r].name, *map(int, counts[r])) for r in range(n_rel)]


# ranges used for the frequency-range table: {-10}, {-10..-9}, ..., {-10..0}
# and {0..10}, {1..10}, ..., {10}
DEFAULT_FREQUENCY_RANGES = [(-10, hi) for hi in range(-10, 1)] + [(lo, 10) for lo in range(0, 11)]


class RangeRow(NamedTuple):
    lo: int
    hi: int
    multi_keep: int
    directed_keep: int
    undirected_keep: int
    multi_drop: int
    directed_drop: int
    undirected_drop: int


def edges_by_frequency_range(kb: ClosedKB, ranges=DEFAULT_FREQUENCY_RANGES) -> list[RangeRow]:
    rows = []
    for lo, hi in ranges:
        keep = induce(kb, GraphSpec(score="positive", loops="keep", freq_lo=lo, freq_hi=hi))
        drop = induce(kb, GraphSpec(score="positive", loops="drop", freq_lo=lo, freq_hi=hi))
        rows.append(RangeRow(lo, hi, keep.n_multi, len(keep.directed), len(keep.undirected),
                             drop.n_multi, len(drop.directed), len(drop.undirected)))
    return rows


def edge_lines(g: InducedGraph, view: str) -> Iterator[str]:
    """Edge list lines: ``dm`` is ``c1 c2 a``; ``dg``/``ug`` is ``c1 c2 n a1 .. an``."""
    if view == "dm":
        for s, t, a in zip(g.src.tolist(), g.dst.tolist(), g.label.tolist()):
            yield f"{s} {t} {a}\n"
        return
    if view not in ("dg", "ug"):
        raise UsageError(f"unknown edge view {view!r}")
    c = g.directed if view == "dg" else g.undirected
    off = c.offsets.tolist()
    labels = c.labels.tolist()
    for e, (s, t) in enumerate(zip(c.src.tolist(), c.dst.tolist())):
        ls = labels[off[e]:off[e + 1]]
        yield f"{s} {t} {len(ls)} " + " ".join(map(str, ls)) + "\n"


def edge_list_lines(kb: ClosedKB, view: str) -> Iterator[str]:
    """Edge lists over every assertion (no filtering)."""
    return edge_lines(induce(kb, GraphSpec(score="all")), view)
