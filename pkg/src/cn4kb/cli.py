"""Command-line entry point.

Every flag can also be given through an environment variable named
``CN4KB_<FLAG>`` (upper case, dashes as underscores), e.g. ``CN4KB_SEED=7``.
Command-line values win over the environment.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import __version__, closure, derived, graphs, ingest, metrics, report
from .errors import CN4Error, DataError, UsageError
from .graphs import GraphSpec

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2
ENV_PREFIX = "CN4KB_"

POLARITY_ALIASES = {"neg": "negative", "negative": "negative", "pos": "positive",
                    "positive": "positive", "both": "both"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _freq_range(text: str) -> tuple[int, int]:
    try:
        if ":" in text:
            lo, hi = text.split(":", 1)
            return int(lo), int(hi)
        v = int(text)
        return v, v
    except ValueError:
        raise argparse.ArgumentTypeError(f"frequency range must be lo:hi, got {text!r}") from None


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {text}")
    return v


def _add_common(p, need_out=False):
    p.add_argument("--input", required=True,
                   help="directory with the table dumps or with previously derived files")
    p.add_argument("--delimiter", default="\t", help="field delimiter of the dumps (tab)")
    p.add_argument("--out", required=need_out, help="output directory for TSV artifacts")
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument("--threads", type=_positive_int, default=1, help="worker threads")


def _add_graph(p, polarity="both", loops="keep", freq=None):
    p.add_argument("--score", choices=graphs.SCORE_FILTERS, default="positive")
    p.add_argument("--loops", choices=graphs.LOOP_MODES, default=loops)
    p.add_argument("--polarity", choices=sorted(POLARITY_ALIASES), default=polarity)
    p.add_argument("--freq", type=_freq_range, default=freq, metavar="LO:HI",
                   help="inclusive frequency-value range")
    p.add_argument("--relations", default=None,
                   help="comma-separated relation names or indices (default: all)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cn4kb", description="ConceptNet 4 closure and network analysis")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("validate", help="parse the dumps and check referential integrity")
    _add_common(p)

    p = sub.add_parser("closure", help="compute the closure and emit the derived files")
    _add_common(p)
    p.add_argument("--report", help="file for the indicator tables (TSV)")

    p = sub.add_parser("graph", help="induce a graph and write its edge list")
    _add_common(p, need_out=True)
    _add_graph(p)
    p.add_argument("--emit", choices=("dm", "dg", "ug"), default="dg")

    p = sub.add_parser("stats", help="edge tables, degrees and clustering")
    _add_common(p)
    _add_graph(p)
    p.add_argument("--top", type=int, default=100)

    p = sub.add_parser("components", help="weak and strong components")
    _add_common(p)
    _add_graph(p)

    p = sub.add_parser("cores", help="k-core filtration")
    _add_common(p)
    _add_graph(p, loops="drop")

    p = sub.add_parser("paths", help="shortest-path length distributions")
    _add_common(p)
    _add_graph(p)

    p = sub.add_parser("fit", help="power-law fits of the degree distributions")
    _add_common(p)
    _add_graph(p)
    p.add_argument("--bootstrap", type=int, default=100, help="bootstrap replicates (0 = none)")

    p = sub.add_parser("cliques", help="maximal cliques")
    _add_common(p)
    _add_graph(p, polarity="pos")

    p = sub.add_parser("percolate", help="k-clique percolation communities")
    _add_common(p)
    _add_graph(p, polarity="neg")
    p.add_argument("--k", type=int, action="append", default=None,
                   help="clique size (repeatable; default 3 and 4)")

    p = sub.add_parser("communities", help="label propagation or multilevel partitions")
    _add_common(p)
    _add_graph(p, polarity="neg", loops="drop")
    p.add_argument("--algo", choices=("lp", "multilevel"), default="multilevel")
    p.add_argument("--runs", type=_positive_int, default=1)
    p.add_argument("--min-core", type=int, default=0,
                   help="restrict to the vertices of coreness at least this value")

    p = sub.add_parser("mine", help="frequent relation-triple rules")
    _add_common(p)
    p.add_argument("--min-support", type=int, default=300)
    p.add_argument("--min-ratio", type=float, default=0.05)
    p.add_argument("--min-count", type=int, default=300,
                   help="positive-score assertions a relation needs to take part")
    p.add_argument("--witnesses", help="write every support triple of the mined rules here")
    p.add_argument("--conclusion-positive-polarity", action="store_true",
                   help="experimental: conclusions must have positive polarity")

    p = sub.add_parser("reproduce", help="regenerate every table in one run")
    _add_common(p, need_out=True)
    p.add_argument("--bootstrap", type=int, default=100)
    p.add_argument("--runs", type=_positive_int, default=10)
    p.add_argument("--with-paths", action="store_true",
                   help="include all-pairs shortest paths (slow on the full data)")
    _apply_env(parser)
    return parser


def _apply_env(parser: argparse.ArgumentParser) -> None:
    """Use CN4KB_<DEST> environment variables as defaults."""
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            for sp in action.choices.values():
                _apply_env(sp)
            continue
        if not action.option_strings or action.dest in ("help", "version"):
            continue
        value = os.environ.get(ENV_PREFIX + action.dest.upper())
        if value is None:
            continue
        if isinstance(action, argparse._StoreTrueAction):
            action.default = value.lower() in ("1", "true", "yes", "on")
        elif isinstance(action, argparse._AppendAction):
            conv = action.type or str
            action.default = [conv(v) for v in value.split(",") if v]
        else:
            conv = action.type or str
            try:
                action.default = conv(value)
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise UsageError(f"{ENV_PREFIX}{action.dest.upper()}: {exc}") from None
        action.required = False


# --------------------------------------------------------------------------


def load_kb(args) -> closure.ClosedKB:
    src = Path(args.input)
    if not src.is_dir():
        raise UsageError(f"input directory {src} does not exist")
    layout = derived.LAYOUT[ingest.TableKind.ASSERTION]
    if (src / layout[0] / layout[1]).is_file():
        return derived.load_derived_files(src)
    try:
        tables = ingest.load_tables(src, args.delimiter, args.threads)
    except FileNotFoundError as exc:
        raise DataError(str(exc)) from None
    return closure.compute_closure(tables, ingest.build_id_registry(tables))


def _relations(kb, text):
    if text is None:
        return None
    by_name = {r.name: i for i, r in enumerate(kb.relations)}
    out = set()
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if tok in by_name:
            out.add(by_name[tok])
        elif tok.lstrip("-").isdigit() and 0 <= int(tok) < len(kb.relations):
            out.add(int(tok))
        else:
            raise UsageError(f"unknown relation {tok!r}")
    return frozenset(out)


def graph_spec(args, kb) -> GraphSpec:
    lo, hi = args.freq if args.freq is not None else (-10, 10)
    return GraphSpec(score=args.score, loops=args.loops, polarity=POLARITY_ALIASES[args.polarity],
                     freq_lo=lo, freq_hi=hi, relations=_relations(kb, args.relations))


def _finish(args, bundle, out=None) -> None:
    out = out or sys.stdout
    if args.out:
        report.emit_report(bundle, args.out, seed=args.seed)
        print(f"wrote {len(bundle)} artifacts to {args.out}", file=out)
    else:
        for name in sorted(bundle):
            print(f"== {name}", file=out)
            out.write(bundle[name])


def cmd_validate(args) -> int:
    src = Path(args.input)
    if not src.is_dir():
        raise UsageError(f"input directory {src} does not exist")
    try:
        tables = ingest.load_tables(src, args.delimiter, args.threads)
    except FileNotFoundError as exc:
        raise DataError(str(exc)) from None
    registry = ingest.build_id_registry(tables)
    rows = [(k.value, n, registry.max_id[k]) for k, n in tables.counts().items()]
    dangling = ingest.dangling_counts(tables, registry, english_only=True)
    drows = [(k.value, col, n) for (k, col), n in dangling.items()]
    bundle = {
        "table_row_counts.tsv": report.tsv(rows, ["table", "rows", "max_id"]),
        "table_dangling_references.tsv": report.tsv(drows, ["table", "column", "undefined"]),
    }
    _finish(args, bundle)
    return EXIT_OK


def cmd_closure(args) -> int:
    kb = load_kb(args)
    bundle = report.closure_bundle(kb)
    if args.out:
        written = derived.emit_derived_files(kb, args.out)
        bundle = {f"report/{name}": text for name, text in bundle.items()}
        report.emit_report(bundle, args.out, seed=args.seed, written=written)
        print(f"derived files written to {args.out}")
    else:
        out = sys.stdout
        for name in sorted(bundle):
            print(f"== {name}", file=out)
            out.write(bundle[name])
    if args.report:
        text = "".join(f"== {name}\n{bundle[name]}" for name in sorted(bundle)
                       if "indicator" in name or "discrepancy" in name)
        report.write_atomic(args.report, text)
    return EXIT_OK


def cmd_graph(args) -> int:
    kb = load_kb(args)
    g = graphs.induce(kb, graph_spec(args, kb))
    name = derived.EDGE_FILES[args.emit]
    counts = graphs.edge_counts(g)
    bundle = {
        name: "".join(graphs.edge_lines(g, args.emit)),
        "table_graph_counts.tsv": report.tsv([counts], graphs.EdgeCounts._fields),
    }
    _finish(args, bundle)
    return EXIT_OK


def cmd_stats(args) -> int:
    kb = load_kb(args)
    spec = graph_spec(args, kb)
    g = graphs.induce(kb, spec)
    tag = report.graph_tag(spec)
    bundle = report.edges_bundle(kb)
    bundle.update(report.degree_bundle(g, tag, args.top))
    bundle.update(report.clustering_bundle(g, tag))
    _finish(args, bundle)
    return EXIT_OK


def cmd_components(args) -> int:
    kb = load_kb(args)
    spec = graph_spec(args, kb)
    _finish(args, report.components_bundle(graphs.induce(kb, spec), report.graph_tag(spec)))
    return EXIT_OK


def cmd_cores(args) -> int:
    kb = load_kb(args)
    spec = graph_spec(args, kb)
    _finish(args, report.cores_bundle(graphs.induce(kb, spec), report.graph_tag(spec)))
    return EXIT_OK


def cmd_paths(args) -> int:
    kb = load_kb(args)
    spec = graph_spec(args, kb)
    g = graphs.induce(kb, spec)
    _finish(args, report.paths_bundle(g, report.graph_tag(spec), args.threads))
    return EXIT_OK


def _fit_samples(kb, spec: GraphSpec) -> dict:
    g = graphs.induce(kb, spec)
    deg = g.total_degree
    return {report.graph_tag(spec): deg[deg > 0]}


def cmd_fit(args) -> int:
    if args.bootstrap < 0:
        raise UsageError("--bootstrap must be >= 0")
    kb = load_kb(args)
    samples = _fit_samples(kb, graph_spec(args, kb))
    _finish(args, report.fit_bundle(samples, args.bootstrap, args.seed))
    return EXIT_OK


def cmd_cliques(args) -> int:
    kb = load_kb(args)
    spec = graph_spec(args, kb)
    _finish(args, report.cliques_bundle(graphs.induce(kb, spec), report.graph_tag(spec)))
    return EXIT_OK


def cmd_percolate(args) -> int:
    ks = args.k or [3, 4]
    if any(k < 3 for k in ks):
        raise UsageError("--k must be at least 3")
    kb = load_kb(args)
    spec = graph_spec(args, kb)
    _finish(args, report.percolation_bundle(graphs.induce(kb, spec), ks, report.graph_tag(spec)))
    return EXIT_OK


def _community_graph(g, min_core: int):
    keep = ~g.isolated
    if min_core > 0:
        keep &= metrics.core_numbers(g) >= min_core
    sub, _ = g.subgraph(keep)
    return sub


def cmd_communities(args) -> int:
    kb = load_kb(args)
    spec = graph_spec(args, kb)
    g = _community_graph(graphs.induce(kb, spec), args.min_core)
    tag = report.graph_tag(spec) + (f"_core{args.min_core}" if args.min_core else "")
    _finish(args, report.communities_bundle(g, args.algo, args.runs, args.seed, tag,
                                            args.threads))
    return EXIT_OK


def cmd_mine(args) -> int:
    kb = load_kb(args)
    bundle = report.rules_bundle(kb, args.min_support, args.min_ratio, args.min_count,
                                 args.conclusion_positive_polarity, args.threads,
                                 with_witnesses=bool(args.witnesses))
    if args.witnesses:
        text = bundle.pop("rule_witnesses.tsv")
        report.write_atomic(args.witnesses, text)
    _finish(args, bundle)
    return EXIT_OK


def cmd_reproduce(args) -> int:
    kb = load_kb(args)
    bundle = report.closure_bundle(kb)
    bundle.update(report.edges_bundle(kb))
    pols = ("negative", "positive", "both")
    for pol in pols:
        spec = GraphSpec(score="positive", loops="keep", polarity=pol)
        g = graphs.induce(kb, spec)
        tag = report.graph_tag(spec)
        bundle.update(report.degree_bundle(g, tag))
        bundle.update(report.clustering_bundle(g, tag))
        bundle.update(report.components_bundle(g, tag))
        for loops in ("keep", "drop"):
            cspec = spec.replace(loops=loops)
            bundle.update(report.cores_bundle(graphs.induce(kb, cspec), report.graph_tag(cspec)))
        if args.with_paths:
            bundle.update(report.paths_bundle(g, tag, args.threads))
    samples = {}
    for pol in pols:
        samples.update(_fit_samples(kb, GraphSpec(score="positive", loops="keep", polarity=pol)))
    bundle.update(report.fit_bundle(samples, args.bootstrap, args.seed))
    cspec = GraphSpec(score="positive", loops="drop", polarity="positive", freq_lo=0, freq_hi=10)
    bundle.update(report.cliques_bundle(graphs.induce(kb, cspec), report.graph_tag(cspec)))
    nspec = GraphSpec(score="positive", loops="drop", polarity="negative")
    gneg = graphs.induce(kb, nspec)
    bundle.update(report.percolation_bundle(gneg, [3, 4], report.graph_tag(nspec)))
    gc = _community_graph(gneg, 0)
    for algo in ("lp", "multilevel"):
        bundle.update(report.communities_bundle(gc, algo, args.runs, args.seed,
                                                report.graph_tag(nspec), args.threads))
    bundle.update(report.rules_bundle(kb, 300, 0.05, threads=args.threads))
    report.emit_report(bundle, args.out, seed=args.seed)
    print(f"wrote {len(bundle)} artifacts to {args.out}")
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate, "closure": cmd_closure, "graph": cmd_graph, "stats": cmd_stats,
    "components": cmd_components, "cores": cmd_cores, "paths": cmd_paths, "fit": cmd_fit,
    "cliques": cmd_cliques, "percolate": cmd_percolate, "communities": cmd_communities,
    "mine": cmd_mine, "reproduce": cmd_reproduce,
}


def dispatch(argv) -> int:
    try:
        parser = build_parser()
        if not argv:
            parser.print_usage(sys.stderr)
            return EXIT_USAGE
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:  # --help / --version
            return EXIT_OK if not exc.code else EXIT_USAGE
        if args.command is None:
            parser.print_usage(sys.stderr)
            return EXIT_USAGE
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except (DataError, CN4Error) as exc:
        print(f"cn4kb: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"cn4kb: {exc}", file=sys.stderr)
        return EXIT_DATA


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
