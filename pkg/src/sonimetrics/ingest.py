"""Reading publication metadata from CSV/JSON and putting it in time order."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Any, Iterable, Literal, Sequence

from .errors import ParseError, RangeError, ValidationError

Format = Literal["csv", "json"]

COLUMNS = ("id", "year", "month", "mncs", "citations", "categories", "oa", "title")
REQUIRED = ("id", "year", "oa")

# Records without a month sort after every dated record of the same year.
UNKNOWN_MONTH_SORT = 12

_TRUE = {"1", "true", "yes"}
_FALSE = {"", "0", "false", "no"}


@dataclass(frozen=True)
class PublicationRecord:
    id: str
    year: int
    oa: bool = False
    month: int | None = None
    mncs: float | None = None
    citations: int | None = None
    categories: tuple[str, ...] | None = None
    title: str | None = None

    def __post_init__(self) -> None:
        if not self.id:
            raise ValidationError("id must be non-empty", field="id")
        if self.month is not None and not 1 <= self.month <= 12:
            raise RangeError(f"{self.id}: month {self.month} outside 1-12")
        if self.mncs is not None and (math.isnan(self.mncs) or self.mncs < 0 or math.isinf(self.mncs)):
            raise RangeError(f"{self.id}: mncs must be a finite non-negative number, got {self.mncs}")
        if self.citations is not None and self.citations < 0:
            raise RangeError(f"{self.id}: citations must be non-negative, got {self.citations}")
        if self.mncs is None and (self.citations is None or not self.categories):
            raise ValidationError(
                f"{self.id}: mncs is absent and citations/categories are incomplete", field="mncs"
            )

    @property
    def sort_key(self) -> tuple[int, int]:
        return (self.year, self.month if self.month is not None else UNKNOWN_MONTH_SORT)


def _blank(value: Any) -> bool:
    return value is None or (isinstance(value, str) and not value.strip())


def _as_int(name: str, value: Any, line: int | None) -> int | None:
    if _blank(value):
        return None
    if isinstance(value, bool):
        raise ParseError(f"{name}: expected an integer, got {value!r}", line)
    if isinstance(value, int):
        return value
    if isinstance(value, float) and value.is_integer():
        return int(value)
    try:
        return int(str(value).strip())
    except ValueError:
        raise ParseError(f"{name}: expected an integer, got {value!r}", line) from None


def _as_float(name: str, value: Any, line: int | None) -> float | None:
    if _blank(value):
        return None
    if isinstance(value, bool):
        raise ParseError(f"{name}: expected a number, got {value!r}", line)
    try:
        return float(str(value).strip()) if isinstance(value, str) else float(value)
    except (TypeError, ValueError):
        raise ParseError(f"{name}: expected a number, got {value!r}", line) from None


def _as_bool(value: Any, line: int | None) -> bool:
    if value is None or isinstance(value, bool):
        return bool(value)
    if isinstance(value, int) and value in (0, 1):
        return bool(value)
    text = str(value).strip().lower()
    if text in _TRUE:
        return True
    if text in _FALSE:
        return False
    raise ParseError(f"oa: expected 1/0 or true/false, got {value!r}", line)


def _as_categories(value: Any, line: int | None) -> tuple[str, ...] | None:
    if _blank(value):
        return None
    if isinstance(value, str):
        parts = value.split(";")
    elif isinstance(value, list):
        parts = [str(v) for v in value]
    else:
        raise ParseError(f"categories: expected a list or ';'-separated string, got {value!r}", line)
    cats = tuple(p.strip() for p in parts if p.strip())
    return cats or None


def _build(row: dict[str, Any], line: int | None) -> PublicationRecord:
    where = f"line {line}" if line is not None else "record"
    for name in REQUIRED:
        if name not in row:
            raise ValidationError(f"{where}: missing required field '{name}'", field=name)
    for name in ("id", "year"):
        if _blank(row[name]):
            raise ValidationError(f"{where}: required field '{name}' is empty", field=name)
    mncs = _as_float("mncs", row.get("mncs"), line)
    if mncs is not None and mncs < 0:
        raise RangeError(f"{where}: mncs must be non-negative, got {mncs}")
    citations = _as_int("citations", row.get("citations"), line)
    month = _as_int("month", row.get("month"), line)
    title = row.get("title")
    try:
        return PublicationRecord(
            id=str(row["id"]).strip(),
            year=_as_int("year", row["year"], line),  # type: ignore[arg-type]
            oa=_as_bool(row["oa"], line),
            month=month,
            mncs=mncs,
            citations=citations,
            categories=_as_categories(row.get("categories"), line),
            title=None if _blank(title) else str(title),
        )
    except (ValidationError, RangeError) as exc:
        field = getattr(exc, "field", None)
        raise type(exc)(f"{where}: {exc}", **({"field": field} if field else {})) from None


def _parse_csv(text: str) -> list[PublicationRecord]:
    reader = csv.DictReader(io.StringIO(text, newline=""), strict=True)
    out = []
    try:
        for row in reader:
            if None in row:
                raise ParseError("more cells than header columns", reader.line_num)
            if all(_blank(v) for v in row.values()):
                continue
            out.append(_build(row, reader.line_num))
    except csv.Error as exc:
        raise ParseError(str(exc), reader.line_num) from None
    return out


def _parse_json(text: str) -> list[PublicationRecord]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from None
    if not isinstance(data, list):
        raise ParseError("expected a JSON array of publication objects")
    out = []
    for i, obj in enumerate(data):
        if not isinstance(obj, dict):
            raise ParseError(f"element {i} is not an object")
        out.append(_build(obj, None))
    return out


def parse_records(raw: bytes, format: Format = "csv") -> list[PublicationRecord]:
    """Parse UTF-8 publication metadata.

    CSV input must carry a header row using the column names in
    :data:`COLUMNS`; JSON input is an array of objects keyed the same way.
    Unknown columns/keys are ignored.
    """
    try:
        text = raw.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise ParseError(f"input is not valid UTF-8 ({exc.reason} at byte {exc.start})") from None
    if format == "csv":
        records = _parse_csv(text)
    elif format == "json":
        records = _parse_json(text)
    else:
        raise ValueError(f"unknown format {format!r}")
    seen: set[str] = set()
    for rec in records:
        if rec.id in seen:
            raise ValidationError(f"duplicate id {rec.id}", field="id")
        seen.add(rec.id)
    return records


def sort_chronological(records: Iterable[PublicationRecord]) -> list[PublicationRecord]:
    # sorted() is stable, so equal (year, month) keys keep input order
    return sorted(records, key=lambda r: r.sort_key)


def filter_years(
    records: Sequence[PublicationRecord], min_year: int | None = None, max_year: int | None = None
) -> tuple[list[PublicationRecord], list[PublicationRecord]]:
    """Split records into (kept, dropped) by publication year bounds."""
    kept, dropped = [], []
    for rec in records:
        if (min_year is not None and rec.year < min_year) or (max_year is not None and rec.year > max_year):
            dropped.append(rec)
        else:
            kept.append(rec)
    return kept, dropped


def record_to_dict(rec: PublicationRecord) -> dict[str, Any]:
    return {
        "id": rec.id,
        "year": rec.year,
        "month": rec.month,
        "mncs": rec.mncs,
        "citations": rec.citations,
        "categories": list(rec.categories) if rec.categories is not None else None,
        "oa": rec.oa,
        "title": rec.title,
    }
