"""Overlapping day-granular sliding windows over an event log."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from datetime import date, timedelta
from typing import Iterator, Mapping, Sequence

from .events import BugEvent, EventLog

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class WindowSpec:
    index: int
    start_day: date
    length_days: int = 30
    slide_days: int = 1

    @property
    def end_day(self) -> date:
        """Last day covered (inclusive)."""
        return self.start_day + timedelta(days=self.length_days - 1)

    def contains(self, day: date) -> bool:
        return self.start_day <= day <= self.end_day


@dataclass(frozen=True)
class EventSlice:
    window: WindowSpec
    events: tuple[BugEvent, ...]
    # bug_id -> reporter raw author (None for orphan bugs), for every bug touched
    reporters: Mapping[str, str | None]


def window_count(n_days: int, window_days: int, slide_days: int) -> int:
    if n_days < window_days:
        return 0
    return (n_days - window_days) // slide_days + 1


def enumerate_windows(first_day: date, last_day: date,
                      window_days: int = 30, slide_days: int = 1) -> list[WindowSpec]:
    if window_days < 1 or slide_days < 1:
        raise ValueError("window_days and slide_days must be >= 1")
    n_days = (last_day - first_day).days + 1
    count = window_count(n_days, window_days, slide_days)
    if count == 0:
        log.warning("range of %d days is shorter than one %d-day window", n_days, window_days)
    return [WindowSpec(i, first_day + timedelta(days=i * slide_days), window_days, slide_days)
            for i in range(count)]


def _slice(elog: EventLog, w: WindowSpec, events: Sequence[BugEvent]) -> EventSlice:
    reporters = {}
    for e in events:
        if e.bug_id not in reporters:
            rec = elog.index.get(e.bug_id)
            reporters[e.bug_id] = rec.reporter if rec else None
    return EventSlice(w, tuple(events), reporters)


def events_in_window(elog: EventLog, w: WindowSpec) -> EventSlice:
    """Full scan of the log; the reference path for differential tests."""
    return _slice(elog, w, [e for e in elog.events if w.contains(e.day)])


def iter_window_bounds(elog: EventLog, windows: Sequence[WindowSpec]) -> Iterator[tuple[WindowSpec, int, int]]:
    """Yield ``(window, lo, hi)`` with ``elog.events[lo:hi]`` inside the window.

    Two pointers that only move forward; windows must be in start order.
    """
    events = elog.events
    lo = hi = 0
    n = len(events)
    for w in windows:
        end = w.end_day
        while lo < n and events[lo].day < w.start_day:
            lo += 1
        hi = max(hi, lo)
        while hi < n and events[hi].day <= end:
            hi += 1
        yield w, lo, hi


def iter_slices(elog: EventLog, windows: Sequence[WindowSpec], naive: bool = False) -> Iterator[EventSlice]:
    if naive:
        for w in windows:
            yield events_in_window(elog, w)
        return
    for w, lo, hi in iter_window_bounds(elog, windows):
        yield _slice(elog, w, elog.events[lo:hi])


def membership_count(windows: Sequence[WindowSpec], day: date) -> int:
    return sum(1 for w in windows if w.contains(day))
