"""Reading the eight ConceptNet 4 table dumps.

Each dump is a UTF-8 flat file with one row per line and the column order of
the original SQLite tables.  Empty fields mean SQL NULL.  Text fields may
contain the delimiter only when escaped with a backslash; ``\\n``, ``\\r``,
``\\t`` and ``\\\\`` are recognised as well.
"""

from __future__ import annotations

import enum
import re
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple

from .errors import IntegrityError, ParseError, SchemaError


class TableKind(str, enum.Enum):
    ASSERTION = "assertion"
    CONCEPT = "concept"
    RELATION = "relation"
    FREQUENCY = "frequency"
    FRAME = "frame"
    SURFACEFORM = "surfaceform"
    RAWASSERTION = "rawassertion"
    SENTENCE = "sentence"


INT, TEXT = "int", "text"

# Column layouts of the original tables, in dump order.
SCHEMAS: dict[TableKind, tuple[tuple[str, str], ...]] = {
    TableKind.ASSERTION: (
        ("id", INT), ("language_id", TEXT), ("relation_id", INT),
        ("concept1_id", INT), ("concept2_id", INT), ("score", INT),
        ("frequency_id", INT), ("best_surface1_id", INT),
        ("best_surface2_id", INT), ("best_raw_id", INT), ("best_frame_id", INT),
    ),
    TableKind.CONCEPT: (
        ("id", INT), ("language_id", TEXT), ("text", TEXT),
        ("num_assertions", INT), ("words", INT), ("visible", INT),
    ),
    TableKind.RELATION: (("id", INT), ("name", TEXT), ("description", TEXT)),
    TableKind.FREQUENCY: (
        ("id", INT), ("language_id", TEXT), ("text", TEXT), ("value", INT),
    ),
    TableKind.FRAME: (
        ("id", INT), ("language_id", TEXT), ("text", TEXT), ("relation_id", INT),
        ("goodness", INT), ("frequency_id", INT), ("question_yn", TEXT),
        ("question1", TEXT), ("question2", TEXT),
    ),
    TableKind.SURFACEFORM: (
        ("id", INT), ("language_id", TEXT), ("concept_id", INT), ("text", TEXT),
        ("residue", TEXT), ("use_count", INT),
    ),
    TableKind.RAWASSERTION: (
        ("id", INT), ("created", TEXT), ("updated", TEXT), ("sentence_id", INT),
        ("assertion_id", INT), ("creator_id", INT), ("surface1_id", INT),
        ("surface2_id", INT), ("frame_id", INT), ("batch_id", INT),
        ("language_id", TEXT), ("score", INT),
    ),
    TableKind.SENTENCE: (
        ("id", INT), ("text", TEXT), ("creator_id", INT), ("created_on", TEXT),
        ("language_id", TEXT), ("activity_id", INT), ("score", INT),
    ),
}

# File stem of each dump inside an input directory.
DUMP_NAMES = {
    TableKind.ASSERTION: "conceptnet_assertion",
    TableKind.CONCEPT: "conceptnet_concept",
    TableKind.RELATION: "conceptnet_relation",
    TableKind.FREQUENCY: "nl_frequency",
    TableKind.FRAME: "conceptnet_frame",
    TableKind.SURFACEFORM: "conceptnet_surfaceform",
    TableKind.RAWASSERTION: "conceptnet_rawassertion",
    TableKind.SENTENCE: "corpus_sentence",
}
DUMP_SUFFIXES = (".tsv", ".csv", ".txt", "")

ROW_TYPES = {
    kind: namedtuple(f"{kind.value.capitalize()}Row", [c for c, _ in cols])
    for kind, cols in SCHEMAS.items()
}

MAX_ID = 2**63 - 1
_CANONICAL_INT = re.compile(r"-?(?:0|[1-9][0-9]*)\Z")
_UNESCAPE = {"n": "\n", "r": "\r", "t": "\t", "\\": "\\"}


def _split(line: str, delimiter: str) -> list[str]:
    if "\\" not in line:
        return line.split(delimiter)
    fields, buf = [], []
    i, n = 0, len(line)
    while i < n:
        ch = line[i]
        if ch == "\\":
            if i + 1 >= n:
                raise ValueError("dangling backslash")
            nxt = line[i + 1]
            if nxt == delimiter:
                buf.append(delimiter)
            elif nxt in _UNESCAPE:
                buf.append(_UNESCAPE[nxt])
            else:
                raise ValueError(f"unknown escape \\{nxt}")
            i += 2
            continue
        if ch == delimiter:
            fields.append("".join(buf))
            buf = []
        else:
            buf.append(ch)
        i += 1
    fields.append("".join(buf))
    return fields


def escape_text(text: str, delimiter: str) -> str:
    out = text.replace("\\", "\\\\").replace("\n", "\\n").replace("\r", "\\r")
    out = out.replace("\t", "\\t")
    if delimiter != "\t":
        out = out.replace(delimiter, "\\" + delimiter)
    return out


def _convert(raw: str, kind: str):
    if raw == "":
        return None
    if kind == TEXT:
        return raw
    if not _CANONICAL_INT.match(raw):
        raise ValueError(f"not an integer: {raw!r}")
    value = int(raw)
    if abs(value) > MAX_ID:
        raise ValueError(f"integer out of range: {raw}")
    return value


def parse_lines(lines: Iterable[str], table_kind: TableKind, delimiter: str = "\t",
                path=None) -> list:
    """Parse dump lines of one table into row tuples, preserving order.

    Empty fields become ``None``; an empty text field therefore cannot be
    told apart from NULL, which matches how the dumps encode both.
    """
    table_kind = TableKind(table_kind)
    schema = SCHEMAS[table_kind]
    kinds = [k for _, k in schema]
    arity = len(schema)
    row_type = ROW_TYPES[table_kind]
    rows = []
    for lineno, line in enumerate(lines, start=1):
        if line.endswith("\n"):
            line = line[:-1]
        try:
            fields = _split(line, delimiter)
        except ValueError as exc:
            raise ParseError(str(exc), path, lineno) from None
        if len(fields) != arity:
            raise SchemaError(
                f"{table_kind.value}: expected {arity} fields, got {len(fields)}",
                path, lineno)
        try:
            values = [_convert(f, k) for f, k in zip(fields, kinds)]
        except ValueError as exc:
            raise ParseError(str(exc), path, lineno) from None
        if values[0] is None:
            raise ParseError("empty id field", path, lineno)
        rows.append(row_type._make(values))
    return rows


def parse_table_dump(path, table_kind: TableKind, delimiter: str = "\t") -> list:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_lines(fh, table_kind, delimiter, path=path)


def serialize_rows(rows: Iterable, table_kind: TableKind, delimiter: str = "\t") -> str:
    """Inverse of :func:`parse_lines` for canonical input."""
    kinds = [k for _, k in SCHEMAS[TableKind(table_kind)]]
    out = []
    for row in rows:
        parts = []
        for value, kind in zip(row, kinds):
            if value is None:
                parts.append("")
            elif kind == TEXT:
                parts.append(escape_text(value, delimiter))
            else:
                parts.append(str(value))
        out.append(delimiter.join(parts))
        out.append("\n")
    return "".join(out)


def write_table_dump(path, rows, table_kind, delimiter="\t") -> None:
    Path(path).write_text(serialize_rows(rows, table_kind, delimiter), encoding="utf-8")


def find_dump(directory, table_kind: TableKind) -> Path:
    stem = DUMP_NAMES[TableKind(table_kind)]
    for suffix in DUMP_SUFFIXES:
        candidate = Path(directory) / (stem + suffix)
        if candidate.is_file():
            return candidate
    raise FileNotFoundError(f"no dump for table {stem} in {directory}")


@dataclass
class RawTables:
    """Parsed rows of the eight source tables."""

    assertions: list = field(default_factory=list)
    concepts: list = field(default_factory=list)
    relations: list = field(default_factory=list)
    frequencies: list = field(default_factory=list)
    frames: list = field(default_factory=list)
    surfaceforms: list = field(default_factory=list)
    rawassertions: list = field(default_factory=list)
    sentences: list = field(default_factory=list)

    def rows(self, kind: TableKind) -> list:
        return getattr(self, _ATTR[TableKind(kind)])

    def counts(self) -> dict[TableKind, int]:
        return {kind: len(self.rows(kind)) for kind in TableKind}


_ATTR = {
    TableKind.ASSERTION: "assertions",
    TableKind.CONCEPT: "concepts",
    TableKind.RELATION: "relations",
    TableKind.FREQUENCY: "frequencies",
    TableKind.FRAME: "frames",
    TableKind.SURFACEFORM: "surfaceforms",
    TableKind.RAWASSERTION: "rawassertions",
    TableKind.SENTENCE: "sentences",
}


def load_tables(directory, delimiter: str = "\t", threads: int = 1) -> RawTables:
    """Parse every dump found in ``directory``."""
    paths = {kind: find_dump(directory, kind) for kind in TableKind}
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = {k: pool.submit(parse_table_dump, p, k, delimiter)
                       for k, p in paths.items()}
            parsed = {k: f.result() for k, f in futures.items()}
    else:
        parsed = {k: parse_table_dump(p, k, delimiter) for k, p in paths.items()}
    return RawTables(**{_ATTR[k]: rows for k, rows in parsed.items()})


def write_tables(tables: RawTables, directory, delimiter: str = "\t") -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    suffix = ".tsv" if delimiter == "\t" else ".csv"
    for kind in TableKind:
        write_table_dump(directory / (DUMP_NAMES[kind] + suffix), tables.rows(kind),
                         kind, delimiter)


@dataclass(frozen=True)
class IdRegistry:
    ids: dict  # TableKind -> frozenset[int]
    max_id: dict  # TableKind -> int (-1 for an empty table)

    def contains(self, kind: TableKind, value: int) -> bool:
        return value in self.ids[TableKind(kind)]

    def size(self, kind: TableKind) -> int:
        return len(self.ids[TableKind(kind)])


def build_id_registry(tables: RawTables) -> IdRegistry:
    ids, max_ids = {}, {}
    for kind in TableKind:
        seen = set()
        for row in tables.rows(kind):
            if row.id in seen:
                raise IntegrityError(f"duplicate id {row.id} in table {kind.value}")
            seen.add(row.id)
        ids[kind] = frozenset(seen)
        max_ids[kind] = max(seen) if seen else -1
    for row in tables.frequencies:
        if row.value is not None and not -10 <= row.value <= 10:
            raise IntegrityError(f"frequency {row.id} has value {row.value} outside [-10, 10]")
    return IdRegistry(ids, max_ids)


class RefKind(enum.Enum):
    VALID = "valid"
    NULL = "null"
    UNDEFINED = "undefined"


class Resolution(NamedTuple):
    kind: RefKind
    id: int | None = None

    @property
    def valid(self) -> bool:
        return self.kind is RefKind.VALID


NULL = Resolution(RefKind.NULL)


def resolve_reference(registry: IdRegistry, table_kind: TableKind, value) -> Resolution:
    if value is None:
        return NULL
    if value in registry.ids[TableKind(table_kind)]:
        return Resolution(RefKind.VALID, value)
    return Resolution(RefKind.UNDEFINED, value)


# Reference columns of each table: column -> referenced table.
REFERENCES = {
    TableKind.ASSERTION: {
        "relation_id": TableKind.RELATION, "concept1_id": TableKind.CONCEPT,
        "concept2_id": TableKind.CONCEPT, "frequency_id": TableKind.FREQUENCY,
        "best_surface1_id": TableKind.SURFACEFORM,
        "best_surface2_id": TableKind.SURFACEFORM,
        "best_raw_id": TableKind.RAWASSERTION, "best_frame_id": TableKind.FRAME,
    },
    TableKind.FRAME: {"relation_id": TableKind.RELATION,
                      "frequency_id": TableKind.FREQUENCY},
    TableKind.SURFACEFORM: {"concept_id": TableKind.CONCEPT},
    TableKind.RAWASSERTION: {
        "sentence_id": TableKind.SENTENCE, "assertion_id": TableKind.ASSERTION,
        "surface1_id": TableKind.SURFACEFORM, "surface2_id": TableKind.SURFACEFORM,
        "frame_id": TableKind.FRAME,
    },
}


def dangling_counts(tables: RawTables, registry: IdRegistry, english_only: bool = False):
    """Count undefined references per (table, column).

    With ``english_only`` only assertions tagged ``en`` are inspected; other
    tables are always scanned in full.
    """
    counts = {}
    for kind, columns in REFERENCES.items():
        rows = tables.rows(kind)
        if english_only and kind is TableKind.ASSERTION:
            rows = [r for r in rows if r.language_id == "en"]
        for column, target in columns.items():
            target_ids = registry.ids[target]
            n = 0
            for row in rows:
                v = getattr(row, column)
                if v is not None and v not in target_ids:
                    n += 1
            counts[(kind, column)] = n
    return counts
