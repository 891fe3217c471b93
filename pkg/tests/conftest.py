from __future__ import annotations

import sys
from pathlib import Path

import pytest

from cn4kb import closure, ingest, synth

ROOT = Path(__file__).resolve().parents[1]
MINI = ROOT / "fixtures" / "mini"

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(scope="session")
def mini_tables():
    return ingest.load_tables(MINI)


@pytest.fixture(scope="session")
def mini_kb(mini_tables):
    return closure.compute_closure(mini_tables)


@pytest.fixture(scope="session")
def small_dump():
    return synth.generate(seed=11, n_concepts=40, n_assertions=120, n_foreign=6)


@pytest.fixture(scope="session")
def small_kb(small_dump):
    return closure.compute_closure(small_dump.tables)


# one verdict line per acceptance criterion, echoed after the run
ACCEPTANCE_LINES: dict[str, str] = {}


def _criterion_key(cid: str):
    digits = "".join(ch for ch in cid[1:] if ch.isdigit())
    return (cid[0], int(digits) if digits else 10**6, cid)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for cid in sorted(ACCEPTANCE_LINES, key=_criterion_key):
            terminalreporter.write_line(ACCEPTANCE_LINES[cid])
