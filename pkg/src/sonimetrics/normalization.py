"""Field-normalized citation impact (MNCS).

A paper's score is its citation count divided by the mean citations of all
papers in the same subject category and publication year. A score of 1.0
is world average.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import MissingBaselineError, ParseError, RangeError, ValidationError
from .ingest import PublicationRecord


@dataclass(frozen=True)
class CitationBaseline:
    category: str
    year: int
    expected: float

    def __post_init__(self) -> None:
        if not (self.expected > 0) or math.isinf(self.expected):
            raise RangeError(
                f"baseline ({self.category}, {self.year}): expected citations must be positive, got {self.expected}"
            )


def compute_mncs(citations: int, baselines: Sequence[float]) -> float:
    """Citations over the arithmetic mean of the category-year baselines.

    Multi-category papers are normalized against the mean of their
    categories' expected scores.
    """
    if citations < 0:
        raise RangeError(f"citations must be non-negative, got {citations}")
    if len(baselines) == 0:
        raise MissingBaselineError("no expected-citation baselines supplied")
    for b in baselines:
        if not b > 0:
            raise RangeError(f"expected citation baseline must be positive, got {b}")
    expected = math.fsum(baselines) / len(baselines)
    return citations / expected


def baseline_index(table: Iterable[CitationBaseline]) -> dict[tuple[str, int], float]:
    index: dict[tuple[str, int], float] = {}
    for b in table:
        key = (b.category, b.year)
        if key in index:
            raise ValidationError(f"duplicate baseline for category {b.category!r}, year {b.year}", field="category")
        index[key] = b.expected
    return index


def resolve_mncs(
    record: PublicationRecord,
    table: Sequence[CitationBaseline] | Mapping[tuple[str, int], float] = (),
) -> float:
    """Return the record's score, computing it from baselines when absent.

    Categories without a baseline for the record's year are skipped; the
    record fails only if none of them match.
    """
    if record.mncs is not None:
        return record.mncs
    index = table if isinstance(table, Mapping) else baseline_index(table)
    found = [index[(c, record.year)] for c in record.categories or () if (c, record.year) in index]
    if not found or record.citations is None:
        raise MissingBaselineError(
            f"{record.id}: no baseline for categories {list(record.categories or ())} in {record.year}"
        )
    return compute_mncs(record.citations, found)


def parse_baselines(raw: bytes) -> list[CitationBaseline]:
    """Read a ``category,year,expected`` CSV table."""
    reader = csv.DictReader(io.StringIO(raw.decode("utf-8-sig"), newline=""))
    missing = {"category", "year", "expected"} - set(reader.fieldnames or ())
    if missing:
        raise ValidationError(f"baseline table lacks column(s): {', '.join(sorted(missing))}", field=min(missing))
    out = []
    for row in reader:
        try:
            year = int(row["year"])
            expected = float(row["expected"])
        except (TypeError, ValueError):
            raise ParseError(f"bad baseline row {row!r}", reader.line_num) from None
        out.append(CitationBaseline(row["category"].strip(), year, expected))
    baseline_index(out)
    return out
