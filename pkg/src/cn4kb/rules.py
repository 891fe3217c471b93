"""Relation-triple rules (a X b) and (b Y c) => (a Z c).

Facts are the distinct (concept1, relation, concept2) triples of the
positive-score assertions, whatever their polarity.  The support of a rule is
the number of distinct concept triples (a, b, c) satisfying both premisses;
a success is a support triple whose conclusion (a, Z, c) is also a fact.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .closure import ClosedKB


class Rule(NamedTuple):
    x: int
    y: int
    z: int


@dataclass(frozen=True)
class RuleStats:
    rule: Rule
    support: int
    successes: int

    @property
    def ratio(self) -> float:
        return self.successes / self.support if self.support else 0.0


class Facts:
    """Distinct (a, b) concept pairs per relation, with join helpers."""

    def __init__(self, kb: ClosedKB, conclusion_positive_polarity: bool = False):
        n = len(kb.assertions)
        c1 = np.fromiter((a.concept1 for a in kb.assertions), dtype=np.int64, count=n)
        c2 = np.fromiter((a.concept2 for a in kb.assertions), dtype=np.int64, count=n)
        rel = np.fromiter((a.relation for a in kb.assertions), dtype=np.int64, count=n)
        score = np.fromiter((a.score for a in kb.assertions), dtype=np.int64, count=n)
        self.n_concepts = max(len(kb.concepts), 1)
        self.n_relations = len(kb.relations)
        self.names = [r.name for r in kb.relations]
        self.concept_names = [c.text for c in kb.concepts]
        positive = score > 0
        self.assertion_counts = np.bincount(rel[positive], minlength=self.n_relations)
        self.pairs = self._pairs(c1[positive], c2[positive], rel[positive])
        if conclusion_positive_polarity:
            keep = positive & (kb.frequency_values() > 0)
            self.conclusions = self._pairs(c1[keep], c2[keep], rel[keep])
        else:
            self.conclusions = self.pairs
        self._keys = {r: a * self.n_concepts + b for r, (a, b) in self.conclusions.items()}
        self._by_middle = {}

    def _pairs(self, c1, c2, rel) -> dict[int, tuple[np.ndarray, np.ndarray]]:
        out = {}
        for r in range(self.n_relations):
            sel = rel == r
            keys = np.unique(c1[sel] * self.n_concepts + c2[sel])
            out[r] = (keys // self.n_concepts, keys % self.n_concepts)
        return out

    def out_by_source(self, r: int):
        """Pairs of relation ``r`` grouped by first concept: (starts, counts, targets)."""
        if r not in self._by_middle:
            a, b = self.pairs[r]  # already sorted by a, then b
            counts = np.bincount(a, minlength=self.n_concepts)
            starts = np.zeros(self.n_concepts, dtype=np.int64)
            np.cumsum(counts[:-1], out=starts[1:])
            self._by_middle[r] = (starts, counts, b)
        return self._by_middle[r]

    def join(self, x: int, y: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """All support triples (a, b, c) of premisses X then Y."""
        a, b = self.pairs[x]
        starts, counts, targets = self.out_by_source(y)
        reps = counts[b]
        total = int(reps.sum())
        if total == 0:
            z = np.zeros(0, dtype=np.int64)
            return z, z, z
        ra = np.repeat(a, reps)
        rb = np.repeat(b, reps)
        offsets = np.cumsum(reps) - reps
        pos = np.repeat(starts[b] - offsets, reps) + np.arange(total)
        return ra, rb, targets[pos]

    def holds(self, z: int, a: np.ndarray, c: np.ndarray) -> np.ndarray:
        keys = self._keys[z]
        q = a * self.n_concepts + c
        pos = np.searchsorted(keys, q)
        pos[pos >= len(keys)] = 0
        return (keys[pos] == q) if len(keys) else np.zeros(len(q), dtype=bool)


def eligible_relations(kb: ClosedKB, min_count: int = 300, facts: Facts | None = None) -> list[int]:
    """Relations with at least ``min_count`` positive-score assertions."""
    facts = facts or Facts(kb)
    return [r for r in range(facts.n_relations) if facts.assertion_counts[r] >= min_count]


def rule_stats(kb: ClosedKB, rule: Rule, facts: Facts | None = None) -> RuleStats:
    facts = facts or Facts(kb)
    a, _, c = facts.join(rule.x, rule.y)
    ok = facts.holds(rule.z, a, c)
    return RuleStats(Rule(*rule), len(a), int(ok.sum()))


def witnesses(kb: ClosedKB, rule: Rule, facts: Facts | None = None) -> Iterator[tuple]:
    """(a, b, c, success) for every support triple, in (a, b, c) order."""
    facts = facts or Facts(kb)
    a, b, c = facts.join(rule.x, rule.y)
    ok = facts.holds(rule.z, a, c)
    order = np.lexsort((c, b, a))
    for i in order.tolist():
        yield int(a[i]), int(b[i]), int(c[i]), bool(ok[i])


def mine_frequent(kb: ClosedKB, min_support: int = 300, min_ratio: float = 0.05,
                  min_count: int = 300, conclusion_positive_polarity: bool = False,
                  threads: int = 1, facts: Facts | None = None) -> list[RuleStats]:
    """Every rule over eligible relations meeting both thresholds, by (X, Y, Z)."""
    facts = facts or Facts(kb, conclusion_positive_polarity)
    rels = eligible_relations(kb, min_count, facts)
    for r in rels:  # build the shared indexes before any worker starts
        facts.out_by_source(r)

    def premisses(xy):
        x, y = xy
        a, _, c = facts.join(x, y)
        support = len(a)
        found = []
        if support < min_support or support == 0:
            return found
        for z in rels:
            s = RuleStats(Rule(x, y, z), support, int(facts.holds(z, a, c).sum()))
            if s.ratio >= min_ratio:
                found.append(s)
        return found

    jobs = [(x, y) for x in rels for y in rels]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(premisses, jobs))
    else:
        parts = [premisses(j) for j in jobs]
    return sorted((s for p in parts for s in p), key=lambda s: s.rule)
