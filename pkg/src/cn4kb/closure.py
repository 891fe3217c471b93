"""Closure of the English-language assertions and the consistency indicators.

Every object reachable from an English assertion is loaded in rounds: the
first round takes the assertions and everything they reference directly
(together with the sentences of their raw assertions), and each later round
takes whatever the rows loaded in the previous round reference.  Counting the
initial ID scan as the first pass, the real dump stabilises after three.

Inside a table, rows are ordered by the round that loaded them and then by
ID, so concepts that occur in assertions come first and raised concepts last.
References inside records are indices; ``-1`` marks a null reference and
``-2`` an ID that exists nowhere or outside the closure.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import IntegrityError
from .ingest import ROW_TYPES, IdRegistry, RawTables, TableKind, build_id_registry

NULL_INDEX = -1
UNDEFINED_INDEX = -2

ENGLISH = "en"


class ClosedAssertion(NamedTuple):
    id: int
    concept1: int
    concept2: int
    relation: int
    frequency: int
    frame: int
    surface1: int
    surface2: int
    raw: int
    score: int
    frame_indicator: int = 0
    surface_indicator: int = 0
    raw_indicator: int = 0
    score_indicator: int = 0


class Concept(NamedTuple):
    id: int
    text: str


class Relation(NamedTuple):
    id: int
    name: str
    description: str


class Frequency(NamedTuple):
    id: int
    value: int
    text: str


class Frame(NamedTuple):
    id: int
    relation: int
    frequency: int
    text: str


class SurfaceForm(NamedTuple):
    id: int
    concept: int
    text: str


class RawAssertion(NamedTuple):
    id: int
    sentence: int
    assertion: int
    surface1: int
    surface2: int
    frame: int
    score: int


class Sentence(NamedTuple):
    id: int
    score: int
    text: str


class ScoreTriple(NamedTuple):
    s1: int
    s2: int
    s3: int


# Attribute name of each table inside ClosedKB.
TABLE_ATTR = {
    TableKind.ASSERTION: "assertions",
    TableKind.CONCEPT: "concepts",
    TableKind.RELATION: "relations",
    TableKind.FREQUENCY: "frequencies",
    TableKind.FRAME: "frames",
    TableKind.SURFACEFORM: "surfaceforms",
    TableKind.RAWASSERTION: "rawassertions",
    TableKind.SENTENCE: "sentences",
}


@dataclass
class ClosedKB:
    assertions: list = field(default_factory=list)
    concepts: list = field(default_factory=list)
    relations: list = field(default_factory=list)
    frequencies: list = field(default_factory=list)
    frames: list = field(default_factory=list)
    surfaceforms: list = field(default_factory=list)
    rawassertions: list = field(default_factory=list)
    sentences: list = field(default_factory=list)
    # TableKind -> int64 array mapping original ID to index (-1 / -2 otherwise)
    maps: dict = field(default_factory=dict)
    # Pass 1 only registers IDs; pass 2 loads the English assertions, their
    # direct references and the sentences behind their raw assertions; each
    # later pass loads what the previous one raised.  ``passes`` is the last
    # pass that loaded anything and ``entered`` the pass of every row.
    passes: int = 1
    entered: dict = field(default_factory=dict, repr=False)

    def table(self, kind: TableKind) -> list:
        return getattr(self, TABLE_ATTR[TableKind(kind)])

    def index_of(self, kind: TableKind, id_: int) -> int:
        m = self.maps[TableKind(kind)]
        if 0 <= id_ < len(m):
            return int(m[id_])
        return NULL_INDEX

    @property
    def n_input_concepts(self) -> int:
        """Number of distinct concepts that occur in the assertions."""
        return len(self.input_concepts())

    def input_concepts(self) -> set:
        s = {a.concept1 for a in self.assertions}
        s.update(a.concept2 for a in self.assertions)
        return s

    def best_surfaces(self) -> set:
        s = {a.surface1 for a in self.assertions}
        s.update(a.surface2 for a in self.assertions)
        s.discard(NULL_INDEX)
        return s

    def frequency_values(self) -> np.ndarray:
        """Frequency value of every assertion, aligned with ``assertions``."""
        values = np.array([f.value for f in self.frequencies], dtype=np.int64)
        idx = np.fromiter((a.frequency for a in self.assertions), dtype=np.int64,
                          count=len(self.assertions))
        return values[idx] if len(idx) else np.zeros(0, dtype=np.int64)

    def score_triple(self, i: int) -> ScoreTriple | None:
        """Scores along assertion -> raw assertion -> sentence, or None."""
        a = self.assertions[i]
        if a.raw < 0:
            return None
        raw = self.rawassertions[a.raw]
        if raw.sentence < 0:
            raise IntegrityError(
                f"raw assertion {raw.id} of assertion {a.id} has no sentence")
        return ScoreTriple(a.score, raw.score, self.sentences[raw.sentence].score)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ClosedKB):
            return NotImplemented
        for attr in TABLE_ATTR.values():
            if getattr(self, attr) != getattr(other, attr):
                return False
        if self.maps.keys() != other.maps.keys():
            return False
        return all(np.array_equal(self.maps[k], other.maps[k]) for k in self.maps)

    __hash__ = None


# --------------------------------------------------------------------------
# indicators


def frame_indicator(assertion: ClosedAssertion, frames: Sequence[Frame]) -> int:
    if assertion.frame == NULL_INDEX:
        return 4
    if not 0 <= assertion.frame < len(frames):
        raise IntegrityError(f"assertion {assertion.id}: undefined frame index {assertion.frame}")
    frame = frames[assertion.frame]
    return 2 * (frame.relation != assertion.relation) + (frame.frequency != assertion.frequency)


def _surface_code(surface: int, concept: int, surfaceforms, concepts_in_input) -> int:
    if surface == NULL_INDEX:
        return 3
    if not 0 <= surface < len(surfaceforms):
        raise IntegrityError(f"undefined surface form index {surface}")
    target = surfaceforms[surface].concept
    if target == concept:
        return 0
    return 1 if target in concepts_in_input else 2


def surface_indicator(assertion: ClosedAssertion, surfaceforms: Sequence[SurfaceForm],
                      concepts_in_input) -> int:
    c1 = _surface_code(assertion.surface1, assertion.concept1, surfaceforms, concepts_in_input)
    c2 = _surface_code(assertion.surface2, assertion.concept2, surfaceforms, concepts_in_input)
    return 4 * c1 + c2


def raw_indicator(assertion: ClosedAssertion, rawassertions: Sequence[RawAssertion],
                  assertion_index: int, best_surfaces) -> int:
    """Classify the best raw assertion against the assertion pointing to it.

    ``assertion_index`` is the position of ``assertion`` in the closed table
    and ``best_surfaces`` the set of surface indices that are a best surface
    of some assertion.
    """
    if assertion.raw == NULL_INDEX:
        return 36
    if assertion.raw == UNDEFINED_INDEX:
        return 37
    raw = rawassertions[assertion.raw]
    a = raw.assertion != assertion_index
    f = raw.frame != assertion.frame

    def code(raw_surface, best):
        if raw_surface == best:
            return 0
        return 1 if raw_surface in best_surfaces else 2

    return 18 * a + 9 * f + 3 * code(raw.surface1, assertion.surface1) + code(
        raw.surface2, assertion.surface2)


def discrepancy(t: ScoreTriple | None) -> int:
    if t is None:
        return 0
    s1, s2, s3 = t
    return abs(s1 - s2) + abs(s2 - s3) + abs(s3 - s1)


def half_discrepancy(t: ScoreTriple | None) -> int:
    d = discrepancy(t)
    assert d % 2 == 0
    return d // 2


def score_indicator(t: ScoreTriple | None, raw_resolution: int = 0) -> int:
    """Pairwise-agreement class of the three scores.

    ``raw_resolution`` is the best-raw index of the assertion; a negative
    value (null or undefined) yields class 1 regardless of ``t``.
    """
    if raw_resolution < 0 or t is None:
        return 1
    s1, s2, s3 = t
    p1, p2, p3 = s1 > 0, s2 > 0, s3 > 0
    if s1 == s2 == s3:
        return 0
    if s1 == s2:
        return 2 if p3 == p1 else 3
    if s1 == s3:
        return 4 if p2 == p1 else 5
    if s2 == s3:
        return 6 if p1 == p2 else 7
    return 8 if p1 == p2 == p3 else 9


def classify(kb: ClosedKB) -> ClosedKB:
    """Fill in the four indicators of every assertion in place."""
    concepts_in_input = kb.input_concepts()
    best = kb.best_surfaces()
    out = []
    for i, a in enumerate(kb.assertions):
        t = kb.score_triple(i)
        out.append(a._replace(
            frame_indicator=frame_indicator(a, kb.frames),
            surface_indicator=surface_indicator(a, kb.surfaceforms, concepts_in_input),
            raw_indicator=raw_indicator(a, kb.rawassertions, i, best),
            score_indicator=score_indicator(t, a.raw),
        ))
    kb.assertions = out
    return kb


# --------------------------------------------------------------------------
# closure


def _direct_refs(kind: TableKind, row) -> list[tuple[TableKind, int | None]]:
    if kind is TableKind.ASSERTION:
        return [
            (TableKind.CONCEPT, row.concept1_id), (TableKind.CONCEPT, row.concept2_id),
            (TableKind.RELATION, row.relation_id), (TableKind.FREQUENCY, row.frequency_id),
            (TableKind.FRAME, row.best_frame_id),
            (TableKind.SURFACEFORM, row.best_surface1_id),
            (TableKind.SURFACEFORM, row.best_surface2_id),
            (TableKind.RAWASSERTION, row.best_raw_id),
        ]
    if kind is TableKind.FRAME:
        return [(TableKind.RELATION, row.relation_id), (TableKind.FREQUENCY, row.frequency_id)]
    if kind is TableKind.SURFACEFORM:
        return [(TableKind.CONCEPT, row.concept_id)]
    if kind is TableKind.RAWASSERTION:
        # the assertion a raw row points back to is never loaded: only
        # English assertions belong to the closure by definition
        return [(TableKind.SURFACEFORM, row.surface1_id), (TableKind.SURFACEFORM, row.surface2_id),
                (TableKind.FRAME, row.frame_id), (TableKind.SENTENCE, row.sentence_id)]
    return []


# references whose target must exist whenever they are not null
_REQUIRED = {
    (TableKind.ASSERTION, TableKind.CONCEPT), (TableKind.ASSERTION, TableKind.RELATION),
    (TableKind.ASSERTION, TableKind.FREQUENCY), (TableKind.ASSERTION, TableKind.FRAME),
    (TableKind.ASSERTION, TableKind.SURFACEFORM),
    (TableKind.FRAME, TableKind.RELATION), (TableKind.FRAME, TableKind.FREQUENCY),
    (TableKind.SURFACEFORM, TableKind.CONCEPT),
    (TableKind.RAWASSERTION, TableKind.SURFACEFORM), (TableKind.RAWASSERTION, TableKind.FRAME),
    (TableKind.RAWASSERTION, TableKind.SENTENCE),
}


def compute_closure(tables: RawTables, registry: IdRegistry | None = None) -> ClosedKB:
    if registry is None:
        registry = build_id_registry(tables)
    by_id = {kind: {row.id: row for row in tables.rows(kind)} for kind in TableKind}

    loaded: dict[TableKind, dict[int, int]] = {kind: {} for kind in TableKind}
    english = sorted((a for a in tables.assertions if a.language_id == ENGLISH),
                     key=lambda a: a.id)
    for a in english:
        if a.concept1_id is None or a.concept2_id is None or a.relation_id is None \
                or a.frequency_id is None:
            raise IntegrityError(f"assertion {a.id} has a null concept, relation or frequency")
        if a.score is None:
            raise IntegrityError(f"assertion {a.id} has a null score")
        loaded[TableKind.ASSERTION][a.id] = 0

    def raise_from(rows_by_kind):
        pending: dict[TableKind, set] = defaultdict(set)
        for kind, rows in rows_by_kind.items():
            for row in rows:
                for target, value in _direct_refs(kind, row):
                    if value is None:
                        continue
                    if value not in registry.ids[target]:
                        if (kind, target) in _REQUIRED:
                            raise IntegrityError(
                                f"{kind.value} {row.id} references undefined "
                                f"{target.value} {value}")
                        continue
                    if value not in loaded[target]:
                        pending[target].add(value)
        return pending

    pending = raise_from({TableKind.ASSERTION: english})
    rnd = 1
    while True:
        # sentences of raw assertions are fetched in the same round
        for rid in pending.get(TableKind.RAWASSERTION, ()):
            sid = by_id[TableKind.RAWASSERTION][rid].sentence_id
            if sid is None:
                continue
            if sid not in registry.ids[TableKind.SENTENCE]:
                raise IntegrityError(f"raw assertion {rid} references undefined sentence {sid}")
            if sid not in loaded[TableKind.SENTENCE]:
                pending[TableKind.SENTENCE].add(sid)
        if not any(pending.values()):
            break
        new_rows = {}
        for kind, ids in pending.items():
            for i in ids:
                loaded[kind][i] = rnd
            new_rows[kind] = [by_id[kind][i] for i in ids]
        pending = raise_from(new_rows)
        rnd += 1
    passes = rnd

    order = {kind: sorted(loaded[kind], key=lambda i, d=loaded[kind]: (d[i], i))
             for kind in TableKind}
    index = {kind: {i: n for n, i in enumerate(order[kind])} for kind in TableKind}

    def ref(kind, value, strict=True):
        if value is None:
            return NULL_INDEX
        n = index[kind].get(value)
        if n is None:
            if strict:
                raise IntegrityError(f"{kind.value} {value} is not in the closure")
            return UNDEFINED_INDEX
        return n

    def text(value):
        return "" if value is None else value

    kb = ClosedKB(passes=passes)
    kb.entered = {kind: np.array([max(loaded[kind][i] + 1, 2) for i in order[kind]],
                                 dtype=np.int64) for kind in TableKind}
    for i in order[TableKind.ASSERTION]:
        a = by_id[TableKind.ASSERTION][i]
        kb.assertions.append(ClosedAssertion(
            a.id, ref(TableKind.CONCEPT, a.concept1_id), ref(TableKind.CONCEPT, a.concept2_id),
            ref(TableKind.RELATION, a.relation_id), ref(TableKind.FREQUENCY, a.frequency_id),
            ref(TableKind.FRAME, a.best_frame_id),
            ref(TableKind.SURFACEFORM, a.best_surface1_id),
            ref(TableKind.SURFACEFORM, a.best_surface2_id),
            ref(TableKind.RAWASSERTION, a.best_raw_id, strict=False), a.score))
    for i in order[TableKind.CONCEPT]:
        c = by_id[TableKind.CONCEPT][i]
        kb.concepts.append(Concept(c.id, text(c.text)))
    for i in order[TableKind.RELATION]:
        r = by_id[TableKind.RELATION][i]
        kb.relations.append(Relation(r.id, text(r.name), text(r.description)))
    for i in order[TableKind.FREQUENCY]:
        f = by_id[TableKind.FREQUENCY][i]
        if f.value is None:
            raise IntegrityError(f"frequency {f.id} has a null value")
        kb.frequencies.append(Frequency(f.id, f.value, text(f.text)))
    for i in order[TableKind.FRAME]:
        f = by_id[TableKind.FRAME][i]
        kb.frames.append(Frame(f.id, ref(TableKind.RELATION, f.relation_id),
                               ref(TableKind.FREQUENCY, f.frequency_id), text(f.text)))
    for i in order[TableKind.SURFACEFORM]:
        s = by_id[TableKind.SURFACEFORM][i]
        kb.surfaceforms.append(SurfaceForm(s.id, ref(TableKind.CONCEPT, s.concept_id),
                                           text(s.text)))
    for i in order[TableKind.RAWASSERTION]:
        r = by_id[TableKind.RAWASSERTION][i]
        if r.score is None:
            raise IntegrityError(f"raw assertion {r.id} has a null score")
        kb.rawassertions.append(RawAssertion(
            r.id, ref(TableKind.SENTENCE, r.sentence_id),
            ref(TableKind.ASSERTION, r.assertion_id, strict=False),
            ref(TableKind.SURFACEFORM, r.surface1_id),
            ref(TableKind.SURFACEFORM, r.surface2_id),
            ref(TableKind.FRAME, r.frame_id), r.score))
    for i in order[TableKind.SENTENCE]:
        s = by_id[TableKind.SENTENCE][i]
        if s.score is None:
            raise IntegrityError(f"sentence {s.id} has a null score")
        kb.sentences.append(Sentence(s.id, s.score, text(s.text)))

    for kind in TableKind:
        kb.maps[kind] = build_map(index[kind], registry.ids[kind])
    return classify(kb)


def build_map(index: dict, original_ids) -> np.ndarray:
    """ID -> index array; absent IDs are -1, IDs outside the closure -2.

    The array covers IDs up to the largest one in the closure.
    """
    size = max(index) + 1 if index else 0
    m = np.full(size, NULL_INDEX, dtype=np.int64)
    for i in original_ids:
        if i < size and i >= 0:
            m[i] = UNDEFINED_INDEX
    for i, n in index.items():
        m[i] = n
    return m


def closed_to_tables(kb: ClosedKB) -> RawTables:
    """Rebuild source-style rows from a closed KB.

    Only the fields that the closure looks at are meaningful; the rest are
    filled with neutral values.
    """
    def ident(table, n):
        return None if n < 0 else table[n].id

    # references that were undefined get fresh IDs that exist nowhere
    fresh = iter(range(max((a.id for a in kb.assertions), default=0)
                       + max((r.id for r in kb.rawassertions), default=0) + 1, 2**62))

    def ident_or_fresh(table, n):
        return next(fresh) if n == UNDEFINED_INDEX else ident(table, n)

    A = ROW_TYPES[TableKind.ASSERTION]
    t = RawTables()
    for a in kb.assertions:
        t.assertions.append(A(a.id, ENGLISH, kb.relations[a.relation].id,
                              kb.concepts[a.concept1].id, kb.concepts[a.concept2].id,
                              a.score, kb.frequencies[a.frequency].id,
                              ident(kb.surfaceforms, a.surface1),
                              ident(kb.surfaceforms, a.surface2),
                              ident_or_fresh(kb.rawassertions, a.raw),
                              ident(kb.frames, a.frame)))
    t.concepts = [ROW_TYPES[TableKind.CONCEPT](c.id, ENGLISH, c.text or None, None, None, None)
                  for c in kb.concepts]
    t.relations = [ROW_TYPES[TableKind.RELATION](r.id, r.name or None, r.description or None)
                   for r in kb.relations]
    t.frequencies = [ROW_TYPES[TableKind.FREQUENCY](f.id, ENGLISH, f.text or None, f.value)
                     for f in kb.frequencies]
    t.frames = [ROW_TYPES[TableKind.FRAME](f.id, ENGLISH, f.text or None,
                                           ident(kb.relations, f.relation), None,
                                           ident(kb.frequencies, f.frequency), None, None, None)
                for f in kb.frames]
    t.surfaceforms = [ROW_TYPES[TableKind.SURFACEFORM](s.id, ENGLISH,
                                                       ident(kb.concepts, s.concept),
                                                       s.text or None, None, None)
                      for s in kb.surfaceforms]
    t.rawassertions = [ROW_TYPES[TableKind.RAWASSERTION](
        r.id, None, None, ident(kb.sentences, r.sentence),
        ident_or_fresh(kb.assertions, r.assertion), None, ident(kb.surfaceforms, r.surface1), ident(kb.surfaceforms, r.surface2),
        ident(kb.frames, r.frame), None, ENGLISH, r.score) for r in kb.rawassertions]
    t.sentences = [ROW_TYPES[TableKind.SENTENCE](s.id, s.text or None, None, None, ENGLISH,
                                                 None, s.score) for s in kb.sentences]
    return t


# --------------------------------------------------------------------------
# summaries


class Contradiction(NamedTuple):
    concept1: int
    concept2: int
    relation: int
    witness: tuple[int, int]


def detect_contradictions(kb: ClosedKB) -> list[Contradiction]:
    """Positive-score assertion groups whose frequencies have opposite signs.

    The witness pairs the lowest-indexed assertion of either sign.
    """
    values = kb.frequency_values()
    first_pos: dict = {}
    first_neg: dict = {}
    for i, a in enumerate(kb.assertions):
        if a.score <= 0:
            continue
        key = (a.concept1, a.concept2, a.relation)
        v = values[i]
        if v > 0:
            first_pos.setdefault(key, i)
        elif v < 0:
            first_neg.setdefault(key, i)
    out = []
    for key in sorted(first_pos.keys() & first_neg.keys()):
        i, j = sorted((first_pos[key], first_neg[key]))
        out.append(Contradiction(*key, witness=(i, j)))
    return out


INDICATOR_SIZES = {
    "frame_indicator": 5, "surface_indicator": 16, "raw_indicator": 38, "score_indicator": 10,
}


def indicator_distribution(kb: ClosedKB, name: str) -> list[int]:
    counts = [0] * INDICATOR_SIZES[name]
    for a in kb.assertions:
        counts[getattr(a, name)] += 1
    return counts


def half_discrepancy_histogram(kb: ClosedKB) -> dict[int, int]:
    hist: Counter = Counter()
    for i in range(len(kb.assertions)):
        hist[half_discrepancy(kb.score_triple(i))] += 1
    return dict(sorted(hist.items()))


def closure_summary(kb: ClosedKB) -> dict[str, int]:
    n_input = kb.n_input_concepts
    n_best = len(kb.best_surfaces())
    return {
        "passes": kb.passes,
        "assertions": len(kb.assertions),
        "concepts_in_assertions": n_input,
        "concepts": len(kb.concepts),
        "concepts_raised": len(kb.concepts) - n_input,
        "relations": len(kb.relations),
        "frequencies": len(kb.frequencies),
        "frames": len(kb.frames),
        "surfaceforms": len(kb.surfaceforms),
        "surfaceforms_raised": len(kb.surfaceforms) - n_best,
        "rawassertions": len(kb.rawassertions),
        "sentences": len(kb.sentences),
    }
