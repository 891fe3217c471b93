import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cn4kb import closure, derived
from cn4kb.closure import ClosedKB
from cn4kb.errors import ParseError
from cn4kb.ingest import TableKind


def test_roundtrip_mini(tmp_path, mini_kb):
    derived.emit_derived_files(mini_kb, tmp_path)
    back = derived.load_derived_files(tmp_path)
    assert back == mini_kb


def test_line_counts(tmp_path, mini_kb):
    derived.emit_derived_files(mini_kb, tmp_path)
    for kind, (sub, table, mapname) in derived.LAYOUT.items():
        lines = (tmp_path / sub / table).read_text(encoding="utf-8").count("\n")
        assert lines == len(mini_kb.table(kind))
        maplines = (tmp_path / sub / mapname).read_text().count("\n")
        assert maplines == max(r.id for r in mini_kb.table(kind)) + 1


def test_assertion_lines_have_fourteen_integers(tmp_path, mini_kb):
    derived.emit_derived_files(mini_kb, tmp_path)
    sub, table, _ = derived.LAYOUT[TableKind.ASSERTION]
    for line in (tmp_path / sub / table).read_text().splitlines():
        parts = line.split(" ")
        assert len(parts) == 14 and all(int(p) >= -2 for p in parts)


def test_minus_two_only_in_maps_and_raw_references(tmp_path, mini_kb):
    derived.emit_derived_files(mini_kb, tmp_path, edges=False)
    sub, table, _ = derived.LAYOUT[TableKind.ASSERTION]
    for line in (tmp_path / sub / table).read_text().splitlines():
        ints = [int(p) for p in line.split(" ")]
        assert all(v != -2 for k, v in enumerate(ints) if k != 8)
    for kind in (TableKind.CONCEPT, TableKind.SURFACEFORM, TableKind.FRAME):
        sub, table, _ = derived.LAYOUT[kind]
        n_ints = derived._FORMAT[kind][0]
        for line in (tmp_path / sub / table).read_text(encoding="utf-8").splitlines():
            assert all(int(p) != -2 for p in line.split(" ")[:n_ints])


def test_undirected_lines_put_smaller_index_first(tmp_path, mini_kb):
    derived.emit_derived_files(mini_kb, tmp_path)
    for line in (tmp_path / "edges" / derived.EDGE_FILES["ug"]).read_text().splitlines():
        parts = [int(p) for p in line.split()]
        assert parts[0] <= parts[1] and parts[2] == len(parts) - 3
    total = sum(int(line.split()[2])
                for line in (tmp_path / "edges" / derived.EDGE_FILES["dg"]).read_text().splitlines())
    assert total == len(mini_kb.assertions)


def test_empty_kb(tmp_path):
    kb = ClosedKB(maps={k: np.zeros(0, dtype=np.int64) for k in TableKind})
    derived.emit_derived_files(kb, tmp_path)
    for sub, table, mapname in derived.LAYOUT.values():
        assert (tmp_path / sub / table).read_text() == ""
        assert (tmp_path / sub / mapname).read_text() == ""
    assert derived.load_derived_files(tmp_path) == kb


def test_parse_error_names_file_and_line(tmp_path, mini_kb):
    derived.emit_derived_files(mini_kb, tmp_path, edges=False)
    sub, table, _ = derived.LAYOUT[TableKind.ASSERTION]
    p = tmp_path / sub / table
    lines = p.read_text().splitlines(keepends=True)
    lines[4] = lines[4].replace(" ", " x", 1)
    p.write_text("".join(lines))
    with pytest.raises(ParseError) as exc:
        derived.load_derived_files(tmp_path)
    assert exc.value.line == 5 and exc.value.path == p


@pytest.mark.parametrize("line", ["1 2 3\n", "1 +2 text\n", "1 02 t\n", "1 2 t"])
def test_record_format_violations(line):
    with pytest.raises(ParseError):
        derived.parse_record(TableKind.SURFACEFORM if line != "1 2 3\n" else TableKind.ASSERTION,
                             line, "f", 1)


def test_map_table_mismatch(tmp_path, mini_kb):
    derived.emit_derived_files(mini_kb, tmp_path, edges=False)
    sub, _, mapname = derived.LAYOUT[TableKind.CONCEPT]
    p = tmp_path / sub / mapname
    lines = p.read_text().splitlines()
    k = next(i for i, v in enumerate(lines) if v == "0")
    lines[k] = "1"
    p.write_text("\n".join(lines) + "\n")
    with pytest.raises(ParseError):
        derived.load_derived_files(tmp_path)


@settings(max_examples=200, deadline=None)
@given(st.text(st.characters(blacklist_categories=("Cs",)), max_size=20))
def test_text_escaping_roundtrip(text):
    for kind, rec in [(TableKind.CONCEPT, closure.Concept(3, text)),
                      (TableKind.RELATION, closure.Relation(1, text, text)),
                      (TableKind.SENTENCE, closure.Sentence(9, -4, text))]:
        line = derived.format_record(kind, rec)
        assert line.count("\n") == 1 and line.endswith("\n")
        assert derived.parse_record(kind, line) == rec
