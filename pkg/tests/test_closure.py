import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cn4kb import closure, ingest, synth
from cn4kb.closure import ClosedAssertion, Frame, ScoreTriple
from cn4kb.errors import IntegrityError
from cn4kb.ingest import ROW_TYPES, RawTables, TableKind

A, C, R, F, FR, S, RA, SE = (ROW_TYPES[k] for k in (
    TableKind.ASSERTION, TableKind.CONCEPT, TableKind.RELATION, TableKind.FREQUENCY,
    TableKind.FRAME, TableKind.SURFACEFORM, TableKind.RAWASSERTION, TableKind.SENTENCE))


def twelve_rows() -> RawTables:
    """One English assertion dog-IsA-animal whose second best surface names wolf.

    Reference walk: pass 2 loads the assertion, dog, animal, IsA, the
    frequency, frame 40, surfaces 20 and 21, raw 30 and sentence 50.  Pass 3
    loads wolf (via surface 21) and surface 22 (via raw 30).  Nothing else.
    """
    return RawTables(
        assertions=[A(100, "en", 1, 10, 11, 2, 1, 20, 21, 30, 40)],
        concepts=[C(10, "en", "dog", 1, 1, 1), C(11, "en", "animal", 1, 1, 1),
                  C(12, "en", "wolf", 0, 1, 1)],
        relations=[R(1, "IsA", "is a")],
        frequencies=[F(1, "en", None, 5)],
        frames=[FR(40, "en", "{1} is a {2}", 1, 1, 1, None, None, None)],
        surfaceforms=[S(20, "en", 10, "dog", None, 1), S(21, "en", 12, "wolf", None, 1),
                      S(22, "en", 11, "an animal", None, 1)],
        rawassertions=[RA(30, None, None, 50, 100, 1, 20, 22, 40, 1, "en", 2)],
        sentences=[SE(50, "a dog is an animal", 1, None, "en", 1, 2)],
    )


def test_twelve_row_fixture_walk():
    t = twelve_rows()
    assert sum(t.counts().values()) == 12
    kb = closure.compute_closure(t)
    assert kb.passes == 3
    assert [c.text for c in kb.concepts] == ["dog", "animal", "wolf"]
    assert kb.entered[TableKind.CONCEPT].tolist() == [2, 2, 3]
    assert [s.id for s in kb.surfaceforms] == [20, 21, 22]
    assert kb.entered[TableKind.SURFACEFORM].tolist() == [2, 2, 3]
    assert kb.n_input_concepts == 2
    (a,) = kb.assertions
    assert (a.concept1, a.concept2, a.surface1, a.surface2, a.raw, a.frame) == (0, 1, 0, 1, 0, 0)
    assert a.frame_indicator == 0
    assert a.surface_indicator == 2  # agree / concept missing from the input
    assert a.raw_indicator == 2  # raw surface 22 is nobody's best surface
    assert a.score_indicator == 0
    assert kb.maps[TableKind.CONCEPT].tolist() == [-1] * 10 + [0, 1, 2]


def test_no_english_assertions_gives_empty_closure():
    t = twelve_rows()
    t.assertions = [a._replace(language_id="zh") for a in t.assertions]
    kb = closure.compute_closure(t)
    for kind in TableKind:
        assert kb.table(kind) == []
    assert kb.passes == 1


def test_surface_raised_concept_enters_in_pass_three():
    # a raw assertion's surface whose concept is new needs one more pass
    t = twelve_rows()
    t.concepts.append(C(13, "en", "pet", 0, 1, 1))
    t.surfaceforms.append(S(23, "en", 13, "pet", None, 1))
    t.rawassertions = [t.rawassertions[0]._replace(surface2_id=23)]
    kb = closure.compute_closure(t)
    assert kb.passes == 4
    assert kb.entered[TableKind.CONCEPT].tolist() == [2, 2, 3, 4]


@pytest.mark.parametrize("field,value", [
    ("best_frame_id", 41), ("best_surface1_id", 99), ("concept1_id", 77),
    ("relation_id", 5), ("frequency_id", 3)])
def test_undefined_required_reference(field, value):
    t = twelve_rows()
    t.assertions = [t.assertions[0]._replace(**{field: value})]
    with pytest.raises(IntegrityError):
        closure.compute_closure(t)


def test_undefined_sentence_is_an_integrity_error():
    t = twelve_rows()
    t.rawassertions = [t.rawassertions[0]._replace(sentence_id=51)]
    with pytest.raises(IntegrityError):
        closure.compute_closure(t)


def test_missing_sentence_on_existing_raw_is_an_integrity_error():
    t = twelve_rows()
    t.rawassertions = [t.rawassertions[0]._replace(sentence_id=None)]
    with pytest.raises(IntegrityError, match="no sentence"):
        closure.compute_closure(t)


def test_undefined_best_raw_is_kept_as_minus_two():
    t = twelve_rows()
    t.assertions = [t.assertions[0]._replace(best_raw_id=965)]
    kb = closure.compute_closure(t)
    (a,) = kb.assertions
    assert a.raw == -2 and a.raw_indicator == 37 and a.score_indicator == 1
    assert closure.half_discrepancy(kb.score_triple(0)) == 0


def test_null_best_raw():
    t = twelve_rows()
    t.assertions = [t.assertions[0]._replace(best_raw_id=None)]
    kb = closure.compute_closure(t)
    assert kb.assertions[0].raw_indicator == 36 and kb.assertions[0].score_indicator == 1


# ---------------------------------------------------------------- indicators

def _assertion(**kw):
    base = dict(id=1, concept1=0, concept2=1, relation=0, frequency=0, frame=0, surface1=0,
                surface2=1, raw=0, score=1, frame_indicator=0, surface_indicator=0,
                raw_indicator=0, score_indicator=0)
    base.update(kw)
    return ClosedAssertion(**base)


@pytest.mark.parametrize("rel,freq,expected", [(0, 0, 0), (0, 1, 1), (1, 0, 2), (1, 1, 3)])
def test_frame_indicator_grid(rel, freq, expected):
    frames = [Frame(7, rel, freq, "")]
    assert closure.frame_indicator(_assertion(), frames) == expected


def test_frame_indicator_null():
    assert closure.frame_indicator(_assertion(frame=-1), []) == 4


def test_frame_indicator_undefined_index():
    with pytest.raises(IntegrityError):
        closure.frame_indicator(_assertion(frame=3), [])


def test_surface_indicator_both_null():
    assert closure.surface_indicator(_assertion(surface1=-1, surface2=-1), [], {0, 1}) == 15


def test_surface_indicator_codes():
    sf = [closure.SurfaceForm(1, 0, ""), closure.SurfaceForm(2, 2, ""),
          closure.SurfaceForm(3, 5, "")]
    inp = {0, 1, 2}
    assert closure.surface_indicator(_assertion(surface1=0, surface2=1), sf, inp) == 1
    assert closure.surface_indicator(_assertion(surface1=2, surface2=-1), sf, inp) == 4 * 2 + 3
    assert closure.surface_indicator(_assertion(surface1=1, surface2=0), sf, inp) == 4 + 1


def test_raw_indicator_encoding():
    raws = [closure.RawAssertion(1, 0, 0, 0, 1, 0, 1)]
    assert closure.raw_indicator(_assertion(), raws, 0, {0, 1}) == 0
    assert closure.raw_indicator(_assertion(), raws, 5, {0, 1}) == 18
    assert closure.raw_indicator(_assertion(frame=-1), raws, 0, {0, 1}) == 9
    raws = [closure.RawAssertion(1, 0, 0, 7, 8, 0, 1)]
    assert closure.raw_indicator(_assertion(), raws, 0, {0, 1, 7}) == 3 * 1 + 2
    assert closure.raw_indicator(_assertion(raw=-1), raws, 0, set()) == 36
    assert closure.raw_indicator(_assertion(raw=-2), raws, 0, set()) == 37


def test_discrepancy_examples():
    assert closure.discrepancy(ScoreTriple(16, 16, 16)) == 0
    assert closure.half_discrepancy(ScoreTriple(147, 124, 1)) == 146
    assert closure.half_discrepancy(ScoreTriple(7, -2, 13)) == 15
    assert closure.half_discrepancy(None) == 0


def test_discrepancy_exhaustive_small_range():
    r = range(-6, 7)
    for s in itertools.product(r, r, r):
        d = closure.discrepancy(ScoreTriple(*s))
        assert d % 2 == 0 and d // 2 == max(s) - min(s)


def test_score_indicator_examples():
    assert closure.score_indicator(ScoreTriple(16, 16, 16), 0) == 0
    assert closure.score_indicator(ScoreTriple(7, -2, 13), 0) == 9
    assert closure.score_indicator(ScoreTriple(1, 2, 3), -1) == 1
    assert closure.score_indicator(None, -2) == 1


def _score_class_oracle(s1, s2, s3):
    pos = [s > 0 for s in (s1, s2, s3)]
    if s1 == s2 == s3:
        return 0
    pairs = {(0, 1): 2, (0, 2): 4, (1, 2): 6}
    s = (s1, s2, s3)
    for (i, j), base in pairs.items():
        if s[i] == s[j]:
            other = 3 - i - j
            return base + (pos[other] != pos[i])
    return 8 if len(set(pos)) == 1 else 9


@settings(max_examples=500, deadline=None)
@given(st.integers(-5, 5), st.integers(-5, 5), st.integers(-5, 5))
def test_score_indicator_matches_grid(s1, s2, s3):
    assert closure.score_indicator(ScoreTriple(s1, s2, s3), 0) == _score_class_oracle(s1, s2, s3)


# ---------------------------------------------------------------- closure on synthetic data

def test_indicator_partitions(mini_kb):
    n = len(mini_kb.assertions)
    for name, size in closure.INDICATOR_SIZES.items():
        dist = closure.indicator_distribution(mini_kb, name)
        assert len(dist) == size and sum(dist) == n
    assert sum(closure.half_discrepancy_histogram(mini_kb).values()) == n


def test_only_english_assertions(mini_tables, mini_kb):
    english = sorted(a.id for a in mini_tables.assertions if a.language_id == "en")
    assert sorted(a.id for a in mini_kb.assertions) == english


def test_every_index_resolves(mini_kb):
    kb = mini_kb
    sizes = {k: len(kb.table(k)) for k in TableKind}
    for a in kb.assertions:
        assert 0 <= a.concept1 < sizes[TableKind.CONCEPT]
        assert 0 <= a.concept2 < sizes[TableKind.CONCEPT]
        assert 0 <= a.relation < sizes[TableKind.RELATION]
        assert -1 <= a.frame < sizes[TableKind.FRAME]
        assert -1 <= a.surface1 < sizes[TableKind.SURFACEFORM]
        assert -2 <= a.raw < sizes[TableKind.RAWASSERTION]
    for r in kb.rawassertions:
        assert 0 <= r.sentence < sizes[TableKind.SENTENCE]
        assert -2 <= r.assertion < sizes[TableKind.ASSERTION]
    for s in kb.surfaceforms:
        assert 0 <= s.concept < sizes[TableKind.CONCEPT]


def test_maps_agree_with_tables(mini_tables, mini_kb):
    reg = ingest.build_id_registry(mini_tables)
    for kind in TableKind:
        m = mini_kb.maps[kind]
        rows = mini_kb.table(kind)
        assert len(m) == (max(r.id for r in rows) + 1 if rows else 0)
        for i, r in enumerate(rows):
            assert m[r.id] == i
        for i in np.flatnonzero(m == -2):
            assert int(i) in reg.ids[kind]
        for i in np.flatnonzero(m == -1):
            assert int(i) not in reg.ids[kind]


def test_input_concepts_come_first(mini_kb):
    n = mini_kb.n_input_concepts
    assert mini_kb.input_concepts() == set(range(n))


def test_fixpoint(mini_kb):
    again = closure.compute_closure(closure.closed_to_tables(mini_kb))
    for kind in TableKind:
        assert len(again.table(kind)) == len(mini_kb.table(kind))
    assert again.assertions == mini_kb.assertions
    assert again.rawassertions == mini_kb.rawassertions
    assert again.concepts == mini_kb.concepts


def test_contradictions_match_quadratic_oracle():
    dump = synth.generate(seed=5, n_concepts=25, n_assertions=44, n_foreign=3,
                          contradictions=3, negative_cliques=())
    kb = closure.compute_closure(dump.tables)
    assert len(kb.assertions) == 50
    values = kb.frequency_values()
    found = set()
    for i, j in itertools.combinations(range(len(kb.assertions)), 2):
        a, b = kb.assertions[i], kb.assertions[j]
        if (a.concept1, a.concept2, a.relation) != (b.concept1, b.concept2, b.relation):
            continue
        if a.score > 0 and b.score > 0 and values[i] * values[j] < 0:
            found.add((a.concept1, a.concept2, a.relation))
    got = closure.detect_contradictions(kb)
    assert {(c.concept1, c.concept2, c.relation) for c in got} == found
    planted = {(kb.index_of(TableKind.CONCEPT, a), kb.index_of(TableKind.CONCEPT, b),
                kb.index_of(TableKind.RELATION, r)) for a, b, r in dump.contradictions}
    assert found == planted and len(planted) == 3
    for c in got:
        i, j = c.witness
        assert values[i] * values[j] < 0


def test_single_assertion_has_no_contradiction():
    assert closure.detect_contradictions(closure.compute_closure(twelve_rows())) == []


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000))
def test_closure_properties_random_dumps(seed):
    dump = synth.generate(seed=seed, n_concepts=20, n_assertions=40, n_foreign=4,
                          contradictions=1, negative_cliques=(3,))
    kb = closure.compute_closure(dump.tables)
    for name in closure.INDICATOR_SIZES:
        assert sum(closure.indicator_distribution(kb, name)) == len(kb.assertions)
    again = closure.compute_closure(closure.closed_to_tables(kb))
    assert again.assertions == kb.assertions
    for i in range(len(kb.assertions)):
        t = kb.score_triple(i)
        if t is not None:
            assert closure.half_discrepancy(t) == max(t) - min(t)
