import math

import pytest

from cn4kb import report


def test_histogram_tsv():
    assert report.hist_tsv({1: 3, 2: 1}) == "1\t3\n2\t1\n"


def test_cell_formatting():
    assert report.tsv([(True, 2.5, float("nan"), "a\tb\nc")], ["x", "y", "z", "w"]) == \
        "x\ty\tz\tw\n1\t2.5\tnan\ta b c\n"
    assert float(report.fmt(1 / 3)) == 1 / 3 and not math.isnan(float(report.fmt(0.1)))


def test_manifest_lists_digests_and_seed(tmp_path):
    bundle = {"b.tsv": "2\n", "a.tsv": "1\n", "sub/c.tsv": ""}
    report.emit_report(bundle, tmp_path, seed=9)
    lines = (tmp_path / report.MANIFEST).read_text().splitlines()
    assert lines[0] == "artifact\tsha256\tbytes"
    assert [l.split("\t")[0] for l in lines[1:-1]] == ["a.tsv", "b.tsv", "sub/c.tsv"]
    assert lines[-1] == "#seed\t9"
    name, digest, size = lines[1].split("\t")
    assert (digest, int(size)) == report.file_digest(tmp_path / name)


def test_same_bundle_same_bytes(tmp_path):
    bundle = {"x.tsv": report.hist_tsv({0: 5, 3: 1})}
    report.emit_report(bundle, tmp_path / "1", seed=0)
    report.emit_report(bundle, tmp_path / "2", seed=0)
    assert (tmp_path / "1" / report.MANIFEST).read_bytes() == \
        (tmp_path / "2" / report.MANIFEST).read_bytes()


def test_failed_emit_leaves_nothing(tmp_path):
    (tmp_path / "blocker").write_text("a file, not a directory")
    with pytest.raises(OSError):
        report.emit_report({"0good.tsv": "ok\n", "blocker/x.tsv": "no\n"}, tmp_path)
    assert sorted(p.name for p in tmp_path.iterdir()) == ["blocker"]


def test_write_atomic_replaces(tmp_path):
    p = tmp_path / "deep" / "f.txt"
    report.write_atomic(p, "one")
    report.write_atomic(p, "two")
    assert p.read_text() == "two" and len(list(p.parent.iterdir())) == 1


def test_closure_bundle_totals(mini_kb):
    b = report.closure_bundle(mini_kb)
    for name in ("frame_indicator", "surface_indicator", "raw_indicator", "score_indicator"):
        rows = b[f"table_{name}.tsv"].splitlines()[1:]
        assert sum(int(r.split("\t")[1]) for r in rows) == len(mini_kb.assertions)
    assert len(b["table_contradictions.tsv"].splitlines()) == 1 + 3
