import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cn4kb import closure, graphs, synth
from cn4kb.errors import UsageError
from cn4kb.graphs import GraphSpec, InducedGraph


def test_spec_validation():
    for bad in [dict(score="some"), dict(loops="maybe"), dict(polarity="neutral"),
                dict(freq_lo=3, freq_hi=2), dict(freq_lo=-11), dict(freq_hi=11)]:
        with pytest.raises(UsageError):
            GraphSpec(**bad)
    assert GraphSpec(relations=[2, 1]).relations == frozenset({1, 2})


def _oracle_pass(kb, spec):
    values = kb.frequency_values()
    out = []
    for i, a in enumerate(kb.assertions):
        v = values[i]
        if spec.score == "positive" and not a.score > 0:
            continue
        if not spec.freq_lo <= v <= spec.freq_hi:
            continue
        if spec.polarity == "negative" and v > 0 or spec.polarity == "positive" and v <= 0:
            continue
        if spec.relations is not None and a.relation not in spec.relations:
            continue
        if spec.loops == "drop" and a.concept1 == a.concept2:
            continue
        out.append(i)
    return out


SPECS = [GraphSpec(score=s, loops=l, polarity=p)
         for s in graphs.SCORE_FILTERS for l in graphs.LOOP_MODES for p in graphs.POLARITIES]
SPECS += [GraphSpec(freq_lo=6, freq_hi=10), GraphSpec(relations={0, 2}, loops="drop"),
          GraphSpec(freq_lo=-10, freq_hi=-6, polarity="negative")]


@pytest.mark.parametrize("spec", SPECS, ids=str)
def test_induce_matches_filter_oracle(mini_kb, spec):
    g = graphs.induce(mini_kb, spec)
    idx = _oracle_pass(mini_kb, spec)
    assert g.label.tolist() == idx
    pairs = {(mini_kb.assertions[i].concept1, mini_kb.assertions[i].concept2) for i in idx}
    assert len(g.directed) == len(pairs)
    assert len(g.undirected) == len({(min(p), max(p)) for p in pairs})
    assert g.n == mini_kb.n_input_concepts
    assert g.n_multi >= len(g.directed) >= len(g.undirected)
    if spec.loops == "drop":
        assert not np.any(g.src == g.dst)
    assert g.n_isolated + int(np.count_nonzero(g.total_degree)) == g.n


def test_polarity_additivity(mini_kb):
    cells = {(s, l, p): c for s, l, p, c in graphs.edge_table(mini_kb)}
    assert len(cells) == 12
    for s in graphs.SCORE_FILTERS:
        for l in graphs.LOOP_MODES:
            assert (cells[s, l, "negative"].multi + cells[s, l, "positive"].multi
                    == cells[s, l, "both"].multi)


def test_spec_matching_nothing(mini_kb):
    g = graphs.induce(mini_kb, GraphSpec(relations=set()))
    assert g.n_multi == 0 and g.n_isolated == mini_kb.n_input_concepts


def test_orientation_invariance(mini_kb):
    g = graphs.induce(mini_kb, GraphSpec(score="all"))
    flipped = InducedGraph(g.n, g.dst, g.src, g.label)
    a, b = g.undirected, flipped.undirected
    assert np.array_equal(a.src, b.src) and np.array_equal(a.dst, b.dst)
    assert np.array_equal(a.offsets, b.offsets) and np.array_equal(a.labels, b.labels)
    assert np.all(a.src <= a.dst)


def test_collapsed_labels_partition_the_edges(mini_kb):
    g = graphs.induce(mini_kb, GraphSpec(score="all"))
    for view in (g.directed, g.undirected):
        assert sorted(view.labels.tolist()) == list(range(len(mini_kb.assertions)))
        for e in range(len(view)):
            for lab in view.labels_of(e):
                a = mini_kb.assertions[lab]
                assert {a.concept1, a.concept2} == {int(view.src[e]), int(view.dst[e])}


def test_decompose_by_relation(mini_kb):
    for score in graphs.SCORE_FILTERS:
        rows = graphs.decompose_by_relation(mini_kb, score)
        total = graphs.induce(mini_kb, GraphSpec(score=score))
        assert sum(r.edges for r in rows) == total.n_multi
        assert sum(r.loops for r in rows) == total.n_loops
        for r in rows:
            assert r.edges == r.edges_negative + r.edges_positive
            assert r.loops == r.loops_negative + r.loops_positive


def test_decompose_empty_kb():
    assert graphs.decompose_by_relation(closure.ClosedKB()) == []


def test_frequency_ranges_monotone(mini_kb):
    rows = graphs.edges_by_frequency_range(mini_kb)
    neg = [r for r in rows if r.lo == -10 and r.hi <= 0]
    pos = [r for r in rows if r.hi == 10 and r.lo >= 0]
    for seq in (neg, pos[::-1]):
        for a, b in zip(seq, seq[1:]):
            assert all(x <= y for x, y in zip(a[2:], b[2:]))
    top = next(r for r in rows if (r.lo, r.hi) == (10, 10))
    g = graphs.induce(mini_kb, GraphSpec(freq_lo=10, freq_hi=10))
    assert top.multi_keep == g.n_multi


def test_empty_range_after_filtering(mini_kb):
    (row,) = graphs.edges_by_frequency_range(mini_kb, [(-1, -1)])
    assert row[2:] == (0,) * 6


def test_edge_lines_formats():
    g = InducedGraph.from_edges(3, [(2, 0), (0, 2), (1, 1), (2, 0)])
    assert list(graphs.edge_lines(g, "dm")) == ["2 0 0\n", "0 2 1\n", "1 1 2\n", "2 0 3\n"]
    assert list(graphs.edge_lines(g, "dg")) == ["0 2 1 1\n", "1 1 1 2\n", "2 0 2 0 3\n"]
    assert list(graphs.edge_lines(g, "ug")) == ["0 2 3 0 1 3\n", "1 1 1 2\n"]
    with pytest.raises(UsageError):
        list(graphs.edge_lines(g, "xx"))


def test_subgraph_relabels():
    g = InducedGraph.from_edges(5, [(0, 1), (1, 4), (4, 3), (2, 2)], names=list("abcde"))
    sub, old = g.subgraph(np.array([False, True, True, False, True]))
    assert old.tolist() == [1, 2, 4]
    assert sorted(zip(sub.src.tolist(), sub.dst.tolist())) == [(0, 2), (1, 1)]
    assert sub.names == ["b", "c", "e"]


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 5000))
def test_additivity_random(seed):
    kb = closure.compute_closure(synth.generate(seed, 20, 60, 4, negative_cliques=(3,)).tables)
    for s in graphs.SCORE_FILTERS:
        for l in graphs.LOOP_MODES:
            n = [graphs.induce(kb, GraphSpec(score=s, loops=l, polarity=p)).n_multi
                 for p in graphs.POLARITIES]
            assert n[0] + n[1] == n[2]
