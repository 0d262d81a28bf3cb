from __future__ import annotations

import csv
from pathlib import Path

import pytest

from sonimetrics.ingest import parse_records
from sonimetrics.mapping import map_record

FIXTURES = Path(__file__).parent / "fixtures"
EARLY = FIXTURES / "corpus_early.csv"
LATE = FIXTURES / "corpus_late.csv"
EXAMPLES = FIXTURES / "worked_examples.csv"

_ACCEPTANCE_KEY = pytest.StashKey[list]()


def expected_rows(path: Path) -> list[dict[str, str]]:
    """Fixture rows as printed in the source tables, including the expected pitch column."""
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def load_mapped(path: Path):
    return [map_record(r, r.mncs) for r in parse_records(path.read_bytes(), "csv")]


@pytest.fixture(scope="session")
def early_records():
    return parse_records(EARLY.read_bytes(), "csv")


@pytest.fixture(scope="session")
def late_records():
    return parse_records(LATE.read_bytes(), "csv")


@pytest.fixture(scope="session")
def early_mapped():
    return load_mapped(EARLY)


@pytest.fixture(scope="session")
def late_mapped():
    return load_mapped(LATE)


@pytest.fixture
def acceptance_log(request):
    return request.config.stash.setdefault(_ACCEPTANCE_KEY, [])


def pytest_configure(config):
    config.stash[_ACCEPTANCE_KEY] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)
