"""Space-separated flat files describing a closed knowledge base.

Layout (one directory per table)::

    assertions/ConceptNet4Assertions.txt     14 integers per line
    concepts/ConceptNet4Concepts.txt         id text
    relations/ConceptNet4Relations.txt       id name description
    frequencies/ConceptNet4Frequencies.txt   id value text
    frames/ConceptNet4Frames.txt             id relation frequency text
    surfaceForms/ConceptNet4SurfaceForms.txt id concept text
    rawAssertions/ConceptNet4RawAssertions.txt
                                             id sentence assertion s1 s2 frame score
    sentences/ConceptNet4Sentences.txt       id score text
    <dir>/Map<Name>IDsFromConceptNet4.txt    one index per original ID
    edges/ConceptNet4Edges{DM,DG,UG}.txt     edge lists

Text always comes last on a line.  Backslashes, newlines and carriage
returns inside text are written as ``\\\\``, ``\\n`` and ``\\r`` so every file
reads back unchanged.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from .closure import (ClosedAssertion, ClosedKB, Concept, Frame, Frequency, RawAssertion,
                      Relation, Sentence, SurfaceForm, TABLE_ATTR)
from .errors import ParseError
from .ingest import TableKind

LAYOUT = {
    TableKind.ASSERTION: ("assertions", "ConceptNet4Assertions.txt", "MapAssertionIDsFromConceptNet4.txt"),
    TableKind.CONCEPT: ("concepts", "ConceptNet4Concepts.txt", "MapConceptIDsFromConceptNet4.txt"),
    TableKind.RELATION: ("relations", "ConceptNet4Relations.txt", "MapRelationIDsFromConceptNet4.txt"),
    TableKind.FREQUENCY: ("frequencies", "ConceptNet4Frequencies.txt", "MapFrequencyIDsFromConceptNet4.txt"),
    TableKind.FRAME: ("frames", "ConceptNet4Frames.txt", "MapFrameIDsFromConceptNet4.txt"),
    TableKind.SURFACEFORM: ("surfaceForms", "ConceptNet4SurfaceForms.txt", "MapSurfaceFormIDsFromConceptNet4.txt"),
    TableKind.RAWASSERTION: ("rawAssertions", "ConceptNet4RawAssertions.txt", "MapRawAssertionIDsFromConceptNet4.txt"),
    TableKind.SENTENCE: ("sentences", "ConceptNet4Sentences.txt", "MapSentenceIDsFromConceptNet4.txt"),
}
EDGE_FILES = {"dm": "ConceptNet4EdgesDM.txt", "dg": "ConceptNet4EdgesDG.txt",
              "ug": "ConceptNet4EdgesUG.txt"}

# number of leading integer fields and record type of each table
_FORMAT = {
    TableKind.ASSERTION: (14, ClosedAssertion, False),
    TableKind.CONCEPT: (1, Concept, True),
    TableKind.RELATION: (1, Relation, True),
    TableKind.FREQUENCY: (2, Frequency, True),
    TableKind.FRAME: (3, Frame, True),
    TableKind.SURFACEFORM: (2, SurfaceForm, True),
    TableKind.RAWASSERTION: (7, RawAssertion, False),
    TableKind.SENTENCE: (2, Sentence, True),
}


def escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace("\n", "\\n").replace("\r", "\\r")


def unescape(text: str) -> str:
    if "\\" not in text:
        return text
    out, i = [], 0
    while i < len(text):
        ch = text[i]
        if ch == "\\" and i + 1 < len(text):
            nxt = text[i + 1]
            out.append({"n": "\n", "r": "\r", "s": " ", "\\": "\\"}.get(nxt, "\\" + nxt))
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def format_record(kind: TableKind, rec) -> str:
    if kind is TableKind.RELATION:
        name = escape(rec.name).replace(" ", "\\s")
        return f"{rec.id} {name} {escape(rec.description)}\n"
    n_ints, _, has_text = _FORMAT[kind]
    ints = " ".join(str(v) for v in rec[:n_ints])
    if has_text:
        return f"{ints} {escape(rec[n_ints])}\n"
    return ints + "\n"


def _write(path: Path, lines) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(lines)
    os.replace(tmp, path)


def emit_derived_files(kb: ClosedKB, directory, edges: bool = True) -> list[Path]:
    """Write every table and map file; returns the paths written."""
    root = Path(directory)
    written = []
    for kind, (sub, table_name, map_name) in LAYOUT.items():
        d = root / sub
        d.mkdir(parents=True, exist_ok=True)
        p = d / table_name
        _write(p, (format_record(kind, r) for r in kb.table(kind)))
        written.append(p)
        p = d / map_name
        m = kb.maps.get(kind, np.zeros(0, dtype=np.int64))
        _write(p, (f"{int(v)}\n" for v in m))
        written.append(p)
    if edges:
        from .graphs import edge_list_lines

        d = root / "edges"
        d.mkdir(parents=True, exist_ok=True)
        for view, name in EDGE_FILES.items():
            p = d / name
            _write(p, edge_list_lines(kb, view))
            written.append(p)
    return written


def _parse_int(tok: str, path, lineno) -> int:
    try:
        if tok != str(int(tok)):
            raise ValueError
        return int(tok)
    except ValueError:
        raise ParseError(f"expected an integer, found {tok!r}", path, lineno) from None


def parse_record(kind: TableKind, line: str, path=None, lineno=None):
    n_ints, rtype, has_text = _FORMAT[kind]
    if not line.endswith("\n"):
        raise ParseError("line is not newline-terminated", path, lineno)
    line = line[:-1]
    if kind is TableKind.RELATION:
        parts = line.split(" ", 2)
        if len(parts) != 3:
            raise ParseError("expected id, name and description", path, lineno)
        return Relation(_parse_int(parts[0], path, lineno),
                        unescape(parts[1]), unescape(parts[2]))
    if has_text:
        parts = line.split(" ", n_ints)
        if len(parts) != n_ints + 1:
            raise ParseError(f"expected {n_ints} integers followed by text", path, lineno)
        ints = [_parse_int(t, path, lineno) for t in parts[:n_ints]]
        return rtype(*ints, unescape(parts[n_ints]))
    parts = line.split(" ")
    if len(parts) != n_ints:
        raise ParseError(f"expected {n_ints} integers, found {len(parts)} fields", path, lineno)
    return rtype(*(_parse_int(t, path, lineno) for t in parts))


def _read_lines(path: Path):
    with open(path, encoding="utf-8", newline="") as fh:
        yield from enumerate(fh, start=1)


def load_derived_files(directory) -> ClosedKB:
    root = Path(directory)
    kb = ClosedKB()
    for kind, (sub, table_name, map_name) in LAYOUT.items():
        p = root / sub / table_name
        rows = [parse_record(kind, line, p, n) for n, line in _read_lines(p)]
        setattr(kb, TABLE_ATTR[kind], rows)
        p = root / sub / map_name
        values = []
        for n, line in _read_lines(p):
            if not line.endswith("\n"):
                raise ParseError("line is not newline-terminated", p, n)
            v = _parse_int(line[:-1], p, n)
            if v < -2:
                raise ParseError(f"index {v} below -2", p, n)
            values.append(v)
        kb.maps[kind] = np.array(values, dtype=np.int64)
    _check_consistency(kb, root)
    return kb


def _check_consistency(kb: ClosedKB, root: Path) -> None:
    """Map files and tables must agree on every ID."""
    for kind, (sub, table_name, map_name) in LAYOUT.items():
        m = kb.maps[kind]
        rows = kb.table(kind)
        for i, r in enumerate(rows):
            if not (0 <= r.id < len(m)) or m[r.id] != i:
                raise ParseError(f"{table_name} row {i} (id {r.id}) disagrees with {map_name}",
                                 root / sub / map_name)
        if np.count_nonzero(m >= 0) != len(rows):
            raise ParseError(f"{map_name} maps more IDs than {table_name} holds",
                             root / sub / map_name)
