"""Canonical bug-tracker event model and JSONL/CSV ingestion."""

from __future__ import annotations

import csv
import enum
import io
import json
import logging
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from pathlib import Path
from typing import BinaryIO, Iterable, Mapping

log = logging.getLogger(__name__)

CSV_FIELDS = ("kind", "bug", "author", "ts")


class EventFormatError(ValueError):
    """The stream as a whole cannot be read in the declared format."""


class EventKind(str, enum.Enum):
    REPORT = "report"
    COMMENT = "comment"


@dataclass(frozen=True)
class BugEvent:
    kind: EventKind
    bug_id: str
    author_raw: str
    timestamp: datetime
    ordinal: int = 0

    @property
    def day(self) -> date:
        return self.timestamp.date()


@dataclass(frozen=True)
class Reject:
    line: int
    reason: str
    text: str = ""


@dataclass(frozen=True)
class BugRecord:
    """Per-bug index entry.

    ``reporter`` survives date filtering even when the report itself falls
    outside the range (``report_in_log`` is then False). It is None for
    orphan bugs whose report was never seen.
    """

    reporter: str | None
    comments: tuple[BugEvent, ...] = ()
    report_in_log: bool = True


@dataclass(frozen=True)
class EventLog:
    events: tuple[BugEvent, ...] = ()
    index: Mapping[str, BugRecord] = field(default_factory=dict)
    date_range: tuple[date, date] | None = None
    rejects: tuple[Reject, ...] = ()
    duplicates: int = 0

    def __len__(self) -> int:
        return len(self.events)

    @property
    def orphan_bugs(self) -> frozenset[str]:
        return frozenset(b for b, rec in self.index.items() if rec.reporter is None)

    @property
    def authors(self) -> set[str]:
        out = {e.author_raw for e in self.events}
        out.update(rec.reporter for rec in self.index.values() if rec.reporter)
        return out


def parse_timestamp(text: str) -> datetime:
    """ISO-8601 to an aware UTC datetime at second precision; naive input is taken as UTC."""
    text = text.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    ts = datetime.fromisoformat(text)
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc).replace(microsecond=0)


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _record(fields: Mapping[str, object]) -> tuple[EventKind, str, str, datetime]:
    missing = [k for k in CSV_FIELDS if fields.get(k) in (None, "")]
    if missing:
        raise ValueError("missing " + ",".join(missing))
    try:
        kind = EventKind(str(fields["kind"]).strip().lower())
    except ValueError:
        raise ValueError(f"bad kind {fields['kind']!r}") from None
    bug = str(fields["bug"]).strip()
    author = str(fields["author"]).strip()
    if not bug or not author:
        raise ValueError("blank bug or author")
    try:
        ts = parse_timestamp(str(fields["ts"]))
    except ValueError:
        raise ValueError(f"bad timestamp {fields['ts']!r}") from None
    return kind, bug, author, ts


def _jsonl_records(text: str):
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            yield lineno, line, None, f"invalid json: {exc.msg}"
            continue
        if not isinstance(obj, dict):
            yield lineno, line, None, "not an object"
            continue
        yield lineno, line, obj, None


def _csv_records(text: str):
    reader = csv.reader(io.StringIO(text, newline=""))
    header = next(reader, None)
    if header is None:
        return
    header = [h.strip().lower() for h in header]
    if any(f not in header for f in CSV_FIELDS):
        raise EventFormatError(f"csv header must contain {','.join(CSV_FIELDS)}, got {header}")
    for row in reader:
        lineno = reader.line_num
        if not any(cell.strip() for cell in row):
            continue
        text_row = ",".join(row)
        if len(row) != len(header):
            yield lineno, text_row, None, f"expected {len(header)} fields, got {len(row)}"
            continue
        yield lineno, text_row, dict(zip(header, row)), None


def parse_events(stream: BinaryIO | bytes, format: str = "canonical_jsonl") -> EventLog:
    """Parse a canonical dump into a time-ordered :class:`EventLog`.

    Malformed records become rejects (with 1-based line numbers) instead of
    aborting the parse. Exact duplicate records are dropped with a warning.
    """
    data = stream if isinstance(stream, bytes) else stream.read()
    try:
        text = data.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise EventFormatError(f"stream is not valid UTF-8: {exc}") from exc

    if format in ("canonical_jsonl", "jsonl"):
        records = _jsonl_records(text)
    elif format in ("canonical_csv", "csv"):
        records = _csv_records(text)
    else:
        raise ValueError(f"unknown event format {format!r}")

    rejects: list[Reject] = []
    seen: set[tuple] = set()
    reported: set[str] = set()
    parsed: list[tuple[EventKind, str, str, datetime]] = []
    duplicates = 0
    for lineno, raw, fields, error in records:
        if error is None:
            try:
                rec = _record(fields)
            except ValueError as exc:
                error = str(exc)
        if error is not None:
            rejects.append(Reject(lineno, error, raw))
            continue
        if rec in seen:
            duplicates += 1
            continue
        if rec[0] is EventKind.REPORT and rec[1] in reported:
            rejects.append(Reject(lineno, "second report for bug", raw))
            continue
        seen.add(rec)
        if rec[0] is EventKind.REPORT:
            reported.add(rec[1])
        parsed.append(rec)
    if duplicates:
        log.warning("dropped %d duplicate event records", duplicates)
    return assemble_log(parsed, rejects=tuple(rejects), duplicates=duplicates)


def assemble_log(records: Iterable[tuple[EventKind, str, str, datetime]], **extra) -> EventLog:
    # stable sort keeps input order for same-second ties
    ordered = sorted(records, key=lambda r: r[3])
    reporters: dict[str, str] = {}
    comments: dict[str, list[BugEvent]] = {}
    events: list[BugEvent] = []
    for kind, bug, author, ts in ordered:
        if kind is EventKind.REPORT:
            reporters[bug] = author
            events.append(BugEvent(kind, bug, author, ts, 0))
        else:
            bucket = comments.setdefault(bug, [])
            ev = BugEvent(kind, bug, author, ts, len(bucket) + 1)
            bucket.append(ev)
            events.append(ev)

    index = {}
    for bug in sorted(set(reporters) | set(comments)):
        index[bug] = BugRecord(reporters.get(bug), tuple(comments.get(bug, ())), bug in reporters)
    orphans = [b for b, rec in index.items() if rec.reporter is None]
    if orphans:
        log.warning("%d bugs have comments but no report (orphan comments)", len(orphans))
    date_range = (events[0].day, events[-1].day) if events else None
    return EventLog(tuple(events), index, date_range, **extra)


def filter_date_range(elog: EventLog, first_day: date, last_day: date) -> EventLog:
    """Keep events whose UTC day lies in ``[first_day, last_day]``.

    Bugs reported before ``first_day`` but commented inside the range keep
    their reporter in the index (``report_in_log=False``).
    """
    if first_day > last_day:
        raise ValueError(f"inverted date range {first_day} > {last_day}")
    keep = tuple(e for e in elog.events if first_day <= e.day <= last_day)
    kept_reports = {e.bug_id for e in keep if e.kind is EventKind.REPORT}
    index = {}
    for bug, rec in elog.index.items():
        cs = tuple(c for c in rec.comments if first_day <= c.day <= last_day)
        in_log = bug in kept_reports
        if not cs and not in_log:
            continue
        index[bug] = BugRecord(rec.reporter, cs, in_log)
    return EventLog(keep, index, (first_day, last_day), elog.rejects, elog.duplicates)


def serialize_events(elog: EventLog, format: str = "canonical_jsonl") -> bytes:
    if format in ("canonical_jsonl", "jsonl"):
        lines = [
            json.dumps({"kind": e.kind.value, "bug": e.bug_id, "author": e.author_raw,
                        "ts": format_timestamp(e.timestamp)})
            for e in elog.events
        ]
        return ("\n".join(lines) + ("\n" if lines else "")).encode()
    if format in ("canonical_csv", "csv"):
        buf = io.StringIO(newline="")
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(CSV_FIELDS)
        for e in elog.events:
            w.writerow([e.kind.value, e.bug_id, e.author_raw, format_timestamp(e.timestamp)])
        return buf.getvalue().encode()
    raise ValueError(f"unknown event format {format!r}")


def format_for_path(path: str | Path) -> str:
    return "canonical_csv" if str(path).lower().endswith(".csv") else "canonical_jsonl"


def read_events(path: str | Path, format: str | None = None, write_rejects: bool = True) -> EventLog:
    """Parse an event file; rejects go to ``<path>.rejects`` when there are any."""
    path = Path(path)
    with path.open("rb") as fh:
        elog = parse_events(fh, format or format_for_path(path))
    if write_rejects and elog.rejects:
        write_rejects_file(elog.rejects, Path(str(path) + ".rejects"))
    return elog


def write_rejects_file(rejects: Iterable[Reject], path: Path) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["line", "reason", "record"])
        for r in rejects:
            w.writerow([r.line, r.reason, r.text])
