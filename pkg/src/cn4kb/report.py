"""Tabular artifacts and their atomic, digest-stamped emission."""

from __future__ import annotations

import hashlib
import os
import tempfile
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from . import cliques, closure, communities, graphs, metrics, powerlaw, rules
from .closure import ClosedKB
from .graphs import GraphSpec, InducedGraph

Bundle = dict  # artifact name -> text

MANIFEST = "MANIFEST.tsv"


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return "nan" if v != v else repr(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v).replace("\t", " ").replace("\n", " ")


def tsv(rows: Iterable, header: Iterable[str] | None = None) -> str:
    lines = []
    if header is not None:
        lines.append("\t".join(header))
    lines.extend("\t".join(fmt(v) for v in row) for row in rows)
    return "".join(line + "\n" for line in lines)


def hist_tsv(h: Mapping) -> str:
    """Two columns, value and count, no header."""
    return tsv(h.items())


def write_atomic(path, text: str) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=target.parent)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(text.encode("utf-8"))
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return target


def file_digest(path) -> tuple[str, int]:
    h = hashlib.sha256()
    size = 0
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
            size += len(block)
    return h.hexdigest(), size


def emit_report(bundle: Mapping[str, str], out_dir, seed: int | None = None,
                written: Iterable = ()) -> list[Path]:
    """Write every artifact plus ``MANIFEST.tsv``; all or nothing.

    Artifacts are first written to temporary files in ``out_dir`` and only
    renamed into place once all of them exist.  ``written`` names files
    already present under ``out_dir`` that the manifest should also list.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for name in sorted(bundle):
        data = bundle[name].encode("utf-8")
        entries.append((name, data, hashlib.sha256(data).hexdigest()))
    listed = [(name, digest, len(data)) for name, data, digest in entries]
    for p in written:
        listed.append((Path(p).relative_to(out).as_posix(), *file_digest(p)))
    manifest = ["artifact\tsha256\tbytes\n"]
    manifest += [f"{name}\t{digest}\t{size}\n" for name, digest, size in sorted(listed)]
    manifest.append(f"#seed\t{seed if seed is not None else ''}\n")
    entries.append((MANIFEST, "".join(manifest).encode("utf-8"), None))
    temps = []
    try:
        for name, data, _ in entries:
            target = out / name
            target.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=target.parent)
            temps.append((tmp, target))
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
        for tmp, target in temps:
            os.replace(tmp, target)
    except BaseException:
        for tmp, _ in temps:
            if os.path.exists(tmp):
                os.unlink(tmp)
        raise
    return [t for _, t in temps]


# --------------------------------------------------------------------------
# bundles


def closure_bundle(kb: ClosedKB) -> Bundle:
    b: Bundle = {}
    b["table_closure_summary.tsv"] = tsv(closure.closure_summary(kb).items(), ["quantity", "value"])
    for name in closure.INDICATOR_SIZES:
        dist = closure.indicator_distribution(kb, name)
        b[f"table_{name}.tsv"] = tsv(enumerate(dist), ["indicator", "assertions"])
    b["hist_half_discrepancy.tsv"] = hist_tsv(closure.half_discrepancy_histogram(kb))
    rows = []
    for c in closure.detect_contradictions(kb):
        i, j = c.witness
        rows.append((kb.concepts[c.concept1].text, kb.relations[c.relation].name,
                     kb.concepts[c.concept2].text, kb.assertions[i].id, kb.assertions[j].id))
    b["table_contradictions.tsv"] = tsv(rows, ["concept1", "relation", "concept2",
                                               "assertion_a", "assertion_b"])
    return b


def edges_bundle(kb: ClosedKB) -> Bundle:
    b: Bundle = {}
    rows = [(s, l, p, *c) for s, l, p, c in graphs.edge_table(kb)]
    b["table_edges_isolated.tsv"] = tsv(rows, ["score", "loops", "polarity", "multigraph",
                                               "directed", "undirected", "isolated"])
    for score in graphs.SCORE_FILTERS:
        rows = graphs.decompose_by_relation(kb, score)
        total = tuple(sum(r[k] for r in rows) for k in range(2, 8))
        rows = [tuple(r) for r in rows] + [(-1, "total", *total)]
        b[f"table_relations_{score}.tsv"] = tsv(rows, graphs.RelationRow._fields)
    b["table_frequency_ranges.tsv"] = tsv(graphs.edges_by_frequency_range(kb),
                                          graphs.RangeRow._fields)
    return b


def degree_bundle(g: InducedGraph, tag: str, top: int = 100) -> Bundle:
    b: Bundle = {}
    ds = metrics.degree_stats(g)
    for which in ("total", "in", "out"):
        b[f"hist_degree_{which}_{tag}.tsv"] = hist_tsv(ds.histogram(which))
    b[f"table_top_degree_{tag}.tsv"] = tsv(ds.top_k(top), metrics.TopVertex._fields)
    rows = []
    for view in ("multi", "directed", "undirected"):
        rows.append((view, metrics.average_degree(g, view),
                     metrics.average_degree(g, view, exclude_isolated=True)
                     if g.n > g.n_isolated else float("nan")))
    b[f"table_average_degree_{tag}.tsv"] = tsv(rows, ["view", "all_vertices", "non_isolated"])
    return b


def clustering_bundle(g: InducedGraph, tag: str) -> Bundle:
    def safe(fn, *a):
        try:
            return fn(*a)
        except metrics.UndefinedError:
            return float("nan")

    rows = [("transitivity", safe(metrics.transitivity_global, g)),
            ("clustering_nan", safe(metrics.clustering_avg, g, "nan")),
            ("clustering_zero", safe(metrics.clustering_avg, g, "zero"))]
    return {f"table_clustering_{tag}.tsv": tsv(rows, ["measure", "value"])}


def components_bundle(g: InducedGraph, tag: str) -> Bundle:
    w = metrics.weak_components(g)
    s = metrics.strong_components(g)
    summary = [("weak", w.count, w.largest), ("strong", s.count, s.largest)]
    return {
        f"hist_wcc_sizes_{tag}.tsv": hist_tsv(w.size_distribution()),
        f"hist_scc_sizes_{tag}.tsv": hist_tsv(s.size_distribution()),
        f"table_components_{tag}.tsv": tsv(summary, ["kind", "components", "largest"]),
    }


def cores_bundle(g: InducedGraph, tag: str) -> Bundle:
    cf = metrics.coreness(g)
    return {
        f"hist_coreness_{tag}.tsv": hist_tsv(cf.histogram()),
        f"table_core_filtration_{tag}.tsv": tsv(cf.levels, metrics.CoreLevel._fields),
    }


def paths_bundle(g: InducedGraph, tag: str, threads: int = 1) -> Bundle:
    b: Bundle = {}
    rows = []
    for directed in (True, False):
        kind = "directed" if directed else "undirected"
        h = metrics.path_length_histogram(g, directed, threads)
        b[f"hist_paths_{kind}_{tag}.tsv"] = tsv(h.rows())
        if h.longest:
            geo = metrics.longest_geodesic(g, directed, hist=h)
            avg = h.average()
            witness = " -> ".join(g.name(v) for v in geo.path)
        else:
            avg, witness = float("nan"), ""
        rows.append((kind, avg, h.longest, witness))
    b[f"table_paths_{tag}.tsv"] = tsv(rows, ["orientation", "average", "longest", "witness"])
    return b


def fit_bundle(samples_by_tag: Mapping[str, np.ndarray], bootstrap_n: int, seed: int) -> Bundle:
    rows = []
    for tag, samples in samples_by_tag.items():
        try:
            f = powerlaw.powerlaw_fit(samples, bootstrap_n=bootstrap_n, seed=seed)
        except powerlaw.FitError as exc:
            rows.append((tag, "nan", "", "nan", "nan", "nan", bootstrap_n, len(samples),
                         "nan", "nan", "nan", "nan", f"fit error: {exc}"))
            continue
        m = f.moments
        rows.append((tag, f.alpha, f.xmin, f.loglik, f.ks_statistic, f.p_value, bootstrap_n,
                     f.n, m.mean, m.std_dev, m.skewness, m.kurtosis, ""))
    header = ["sample", "alpha", "xmin", "loglik", "ks", "p_value", "bootstrap", "n", "mean",
              "std_dev", "skewness", "kurtosis", "note"]
    return {"table_powerlaw.tsv": tsv(rows, header)}


def cliques_bundle(g: InducedGraph, tag: str, cs: cliques.CliqueSet | None = None) -> Bundle:
    cs = cs or cliques.maximal_cliques(g)
    rows = [(size, count) for size, count in cs.size_distribution(min_size=3).items()]
    largest = [", ".join(g.name(v) for v in c) for c in cs.largest()]
    return {
        f"hist_clique_sizes_{tag}.tsv": tsv(rows),
        f"table_cliques_{tag}.tsv": tsv([("maximal_cliques_size_3_or_more", cs.count(3)),
                                         ("maximal_cliques_all", len(cs))]
                                        + [("largest", s) for s in largest],
                                        ["quantity", "value"]),
    }


def percolation_bundle(g: InducedGraph, ks: Iterable[int], tag: str) -> Bundle:
    b: Bundle = {}
    cs = cliques.maximal_cliques(g, min_size=3)
    summary = []
    non_isolated = np.flatnonzero(~g.isolated)
    for k in ks:
        cover = cliques.k_clique_percolation(g, k, cs)
        summary.append((k, len(cover)))
        b[f"hist_percolation_sizes_{tag}_k{k}.tsv"] = hist_tsv(cover.size_distribution())
        b[f"hist_percolation_membership_{tag}_k{k}.tsv"] = hist_tsv(
            cover.membership_distribution(non_isolated))
        b[f"cover_{tag}_k{k}.tsv"] = tsv((i, v) for i, c in enumerate(cover.communities)
                                         for v in c)
    b[f"table_percolation_{tag}.tsv"] = tsv(summary, ["k", "communities"])
    return b


def communities_bundle(g: InducedGraph, algorithm: str, runs: int, seed: int, tag: str,
                       threads: int = 1) -> Bundle:
    st = communities.run_stats(algorithm, g, runs, seed, threads)
    rows = [("kappa", st.kappa_avg, st.kappa_min, st.kappa_max),
            ("mu", st.mu_avg, st.mu_min, st.mu_max)]
    first = st.partitions[0]
    return {
        f"table_communities_{algorithm}_{tag}.tsv": tsv(rows, ["quantity", "avg", "min", "max"]),
        f"partition_{algorithm}_{tag}.tsv": tsv(
            (int(c), v) for v, c in enumerate(first.membership.tolist())),
    }


def rules_bundle(kb: ClosedKB, min_support: int, min_ratio: float, min_count: int = 300,
                 conclusion_positive_polarity: bool = False, threads: int = 1,
                 with_witnesses: bool = False) -> Bundle:
    facts = rules.Facts(kb, conclusion_positive_polarity)
    found = rules.mine_frequent(kb, min_support, min_ratio, min_count,
                                conclusion_positive_polarity, threads, facts)
    names = facts.names
    rows = [(names[s.rule.x], names[s.rule.y], names[s.rule.z], s.ratio, s.successes, s.support)
            for s in found]
    b = {"table_rules.tsv": tsv(rows, ["X", "Y", "Z", "ratio", "successes", "support"])}
    if with_witnesses:
        wrows = []
        cn = facts.concept_names
        for s in found:
            for a, m, c, ok in rules.witnesses(kb, s.rule, facts):
                wrows.append((names[s.rule.x], names[s.rule.y], names[s.rule.z],
                              cn[a], cn[m], cn[c], ok))
        b["rule_witnesses.tsv"] = tsv(wrows, ["X", "Y", "Z", "a", "b", "c", "success"])
    return b


def graph_tag(spec: GraphSpec) -> str:
    pol = {"negative": "neg", "positive": "pos", "both": "both"}[spec.polarity]
    tag = f"{spec.score}_{spec.loops}_{pol}"
    if (spec.freq_lo, spec.freq_hi) != (-10, 10):
        tag += f"_f{spec.freq_lo}..{spec.freq_hi}"
    if spec.relations is not None:
        tag += "_r" + "-".join(str(r) for r in sorted(spec.relations))
    return tag
