"""Input parsing into a flat, sortable object list.

Two front doors are supported: a line-oriented N-Triples subset (literals
typed as xsd integer/decimal/double/date/dateTime) and a canonical CSV
format (UTF-8, header row, RFC-4180 quoting). Both produce a Dataset whose
values are plain floats; temporal values are normalized to milliseconds
since the Unix epoch, UTC, so both kinds share one ordering.

Parsing is lenient: bad lines or cells are skipped and counted rather than
aborting, since exploration targets dirty web data.
"""

from __future__ import annotations

import csv
import io
import math
import re
from collections import Counter
from dataclasses import dataclass, field, replace
from datetime import datetime, timedelta, timezone

from .errors import EmptyDatasetError, MixedKindError

NUMERIC = "numeric"
TEMPORAL = "temporal"

XSD = "http://www.w3.org/2001/XMLSchema#"
_NUMERIC_DATATYPES = {XSD + t for t in ("integer", "decimal", "double")}
_TEMPORAL_DATATYPES = {XSD + t for t in ("date", "dateTime")}

_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)
_US = timedelta(microseconds=1)

_TRIPLE_RE = re.compile(
    r'^<([^<>"\s]*)>\s+<([^<>"\s]*)>\s+"((?:[^"\\]|\\.)*)"\^\^<([^<>"\s]*)>\s*\.\s*$'
)


@dataclass(frozen=True)
class DataObject:
    """One (subject, predicate, value) triple with a scalar object value."""

    subject: str
    predicate: str
    value: float


@dataclass
class Dataset:
    """A flat list of objects of one value kind, optionally sorted.

    When ``sorted`` is true the list is the ordered set used by every
    construction algorithm: ascending by value, ties broken by subject.
    """

    objects: list[DataObject]
    kind: str
    predicate: str
    sorted: bool = False
    skipped: int = 0
    ineligible: int = 0
    minv: float = field(init=False)
    maxv: float = field(init=False)

    def __post_init__(self):
        if not self.objects:
            raise EmptyDatasetError("dataset has no objects")
        self._values = [o.value for o in self.objects]
        self.minv = min(self._values)
        self.maxv = max(self._values)

    def __len__(self) -> int:
        return len(self.objects)

    def values(self) -> list[float]:
        return self._values


def epoch_ms(dt: datetime) -> float:
    """Milliseconds since the Unix epoch; naive datetimes are taken as UTC."""
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return ((dt - _EPOCH) // _US) / 1000.0


def parse_temporal(lexical: str) -> float:
    text = lexical.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    return epoch_ms(dt)


def _parse_numeric(lexical: str) -> float:
    value = float(lexical)
    if not math.isfinite(value):
        raise ValueError(f"non-finite value {lexical!r}")
    return value


def _parse_cell(cell: str) -> tuple[str, float]:
    """Classify and parse one lexical value; numeric wins over temporal."""
    try:
        return NUMERIC, _parse_numeric(cell)
    except ValueError:
        return TEMPORAL, parse_temporal(cell)


_UNESCAPES = {"\\t": "\t", "\\n": "\n", "\\r": "\r", '\\"': '"', "\\\\": "\\"}


def _unescape(lexical: str) -> str:
    return re.sub(r"\\.", lambda m: _UNESCAPES.get(m.group(0), m.group(0)[1]), lexical)


def _as_text(data) -> str:
    if isinstance(data, bytes):
        return data.decode("utf-8")
    if isinstance(data, str):
        return data
    raw = data.read()
    return raw.decode("utf-8") if isinstance(raw, bytes) else raw


def parse_ntriples(data, predicate_filter: str | None = None) -> Dataset:
    """Parse an N-Triples stream into a single-predicate Dataset.

    Keeps only triples whose predicate matches ``predicate_filter`` or,
    when absent, the most frequent eligible predicate. Malformed lines are
    skipped and counted; lines with ineligible objects are counted
    separately.
    """
    by_predicate: dict[str, list[tuple[str, str, float]]] = {}
    skipped = 0
    ineligible = 0
    for line in _as_text(data).splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        m = _TRIPLE_RE.match(stripped)
        if m is None:
            skipped += 1
            continue
        subject, predicate, lexical, datatype = m.groups()
        lexical = _unescape(lexical)
        try:
            if datatype in _NUMERIC_DATATYPES:
                entry = (subject, NUMERIC, _parse_numeric(lexical))
            elif datatype in _TEMPORAL_DATATYPES:
                entry = (subject, TEMPORAL, parse_temporal(lexical))
            else:
                ineligible += 1
                continue
        except ValueError:
            skipped += 1
            continue
        by_predicate.setdefault(predicate, []).append(entry)

    if predicate_filter is not None:
        chosen = predicate_filter
        if chosen not in by_predicate:
            raise EmptyDatasetError(f"no eligible triples for predicate {chosen!r}")
    else:
        if not by_predicate:
            raise EmptyDatasetError("no eligible triples in input")
        counts = Counter({p: len(rows) for p, rows in by_predicate.items()})
        chosen = min(counts, key=lambda p: (-counts[p], p))

    rows = by_predicate[chosen]
    ineligible += sum(len(v) for p, v in by_predicate.items() if p != chosen)
    kinds = {kind for _, kind, _ in rows}
    if len(kinds) > 1:
        raise MixedKindError(chosen)
    objects = [DataObject(s, chosen, v) for s, _, v in rows]
    return Dataset(objects, kinds.pop(), chosen, skipped=skipped, ineligible=ineligible)


def parse_csv(data, subject_column: str = "subject", value_column: str | None = None) -> Dataset:
    """Parse a CSV stream with a header row into a Dataset.

    The value column's header becomes the predicate. The value kind is
    fixed by the first parseable cell; rows whose cell does not parse as
    that kind are skipped and counted.
    """
    reader = csv.reader(io.StringIO(_as_text(data)))
    try:
        header = next(reader)
    except StopIteration:
        raise EmptyDatasetError("CSV input is empty") from None
    if subject_column not in header:
        raise EmptyDatasetError(f"missing subject column {subject_column!r}")
    s_idx = header.index(subject_column)
    if value_column is None:
        candidates = [c for c in header if c != subject_column]
        if not candidates:
            raise EmptyDatasetError("no value column in header")
        value_column = candidates[0]
    if value_column not in header:
        raise EmptyDatasetError(f"missing value column {value_column!r}")
    v_idx = header.index(value_column)

    objects: list[DataObject] = []
    kind: str | None = None
    skipped = 0
    for row in reader:
        if not row:
            continue
        try:
            cell = row[v_idx].strip()
            subject = row[s_idx]
            if kind is None:
                kind, value = _parse_cell(cell)
            elif kind == NUMERIC:
                value = _parse_numeric(cell)
            else:
                value = parse_temporal(cell)
        except (ValueError, IndexError):
            skipped += 1
            continue
        objects.append(DataObject(subject, value_column, value))
    if not objects:
        raise EmptyDatasetError("no parseable rows in CSV input")
    return Dataset(objects, kind, value_column, skipped=skipped)


def sort_dataset(dataset: Dataset) -> Dataset:
    """Return the ordered set S: ascending by value, ties by subject."""
    ordered = sorted(dataset.objects, key=lambda o: (o.value, o.subject))
    return replace(dataset, objects=ordered, sorted=True)


def format_value(kind: str, value: float) -> str:
    """Canonical lexical form; round-trips through the parser bit-exactly."""
    if kind == NUMERIC:
        return repr(value)
    micros = round(value * 1000.0)
    dt = _EPOCH + timedelta(microseconds=micros)
    return dt.strftime("%Y-%m-%dT%H:%M:%S.%f") + "Z"


def serialize_csv(dataset: Dataset) -> str:
    """Write the canonical CSV form (header ``subject,<predicate>``)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["subject", dataset.predicate])
    for obj in dataset.objects:
        writer.writerow([obj.subject, format_value(dataset.kind, obj.value)])
    return out.getvalue()
