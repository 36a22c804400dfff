"""Per-window weighted interaction graphs.

A comment links its author to the bug's reporter and to every distinct
participant who commented on that bug earlier in the same window; each such
link adds 1 to the edge weight.
"""

from __future__ import annotations

import csv
import logging
from collections import Counter, defaultdict, deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

from .events import BugEvent, EventKind, EventLog
from .identity import IdentityTable
from .windows import EventSlice, WindowSpec, iter_window_bounds

log = logging.getLogger(__name__)

PRIOR_SCOPES = ("window", "global")

Edge = tuple[str, str]


def edge_key(u: str, v: str) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class InteractionGraph:
    nodes: frozenset[str]
    edges: Mapping[Edge, int]
    window: WindowSpec | None = None
    orphan_bugs: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        for (u, v), wt in self.edges.items():
            if u == v or u > v:
                raise ValueError(f"edge key must be an ordered pair of distinct nodes: {(u, v)}")
            if wt < 1 or int(wt) != wt:
                raise ValueError(f"edge weight must be a positive integer: {(u, v)}={wt}")
            if u not in self.nodes or v not in self.nodes:
                raise ValueError(f"edge endpoint not in node set: {(u, v)}")

    @classmethod
    def from_edges(cls, edges: Mapping[Edge, int] | Iterable[tuple[str, str, int]],
                   nodes: Iterable[str] = (), window: WindowSpec | None = None) -> "InteractionGraph":
        items = edges.items() if isinstance(edges, Mapping) else (((u, v), w) for u, v, w in edges)
        merged: Counter = Counter()
        for (u, v), w in items:
            merged[edge_key(u, v)] += w
        all_nodes = set(nodes)
        for u, v in merged:
            all_nodes.update((u, v))
        return cls(frozenset(all_nodes), dict(merged), window)

    @property
    def n(self) -> int:
        return len(self.nodes)

    def adjacency(self) -> dict[str, list[tuple[str, int]]]:
        adj: dict[str, list[tuple[str, int]]] = {v: [] for v in sorted(self.nodes)}
        for (u, v), w in sorted(self.edges.items()):
            adj[u].append((v, w))
            adj[v].append((u, w))
        for nbrs in adj.values():
            nbrs.sort()
        return adj

    def edge_list(self) -> list[tuple[str, str, int]]:
        return [(u, v, w) for (u, v), w in sorted(self.edges.items())]


def bug_contribution(reporter: str | None, commenters: Sequence[str],
                     earlier: Sequence[str] = ()) -> tuple[set[str], Counter]:
    """Nodes and edge increments produced by one bug's comments.

    ``commenters`` are the in-window comment authors in ordinal order;
    ``earlier`` are authors of comments that precede the window (only used
    with the global prior scope).
    """
    prior: dict[str, None] = {}
    if reporter is not None:
        prior[reporter] = None
    for a in earlier:
        prior[a] = None
    edges: Counter = Counter()
    for c in commenters:
        for p in prior:
            if p != c:
                edges[edge_key(c, p)] += 1
        prior[c] = None
    nodes = set(commenters)
    if reporter is not None:
        nodes.add(reporter)
    for u, v in edges:
        nodes.update((u, v))
    return nodes, edges


def _earlier_authors(elog: EventLog | None, bug: str, start_day, identity) -> list[str]:
    if elog is None or bug not in elog.index:
        return []
    return [identity.alias(c.author_raw) for c in elog.index[bug].comments if c.day < start_day]


def _group_by_bug(events: Iterable[BugEvent]) -> dict[str, list[BugEvent]]:
    by_bug: dict[str, list[BugEvent]] = defaultdict(list)
    for e in events:
        by_bug[e.bug_id].append(e)
    return by_bug


def build_graph(slc: EventSlice, identity: IdentityTable, *, prior_scope: str = "window",
                history: EventLog | None = None) -> InteractionGraph:
    """Build the interaction graph of one window slice from scratch.

    ``history`` is the full log and is required for ``prior_scope="global"``.
    """
    if prior_scope not in PRIOR_SCOPES:
        raise ValueError(f"prior_scope must be one of {PRIOR_SCOPES}")
    if prior_scope == "global" and history is None:
        raise ValueError("prior_scope='global' needs the full event history")
    nodes: set[str] = set()
    edges: Counter = Counter()
    orphans = []
    for bug, evs in sorted(_group_by_bug(slc.events).items()):
        reporter_raw = slc.reporters.get(bug)
        reporter = identity.alias(reporter_raw) if reporter_raw is not None else None
        if reporter is None:
            orphans.append(bug)
        commenters = [identity.alias(e.author_raw)
                      for e in sorted(evs, key=lambda e: e.ordinal) if e.kind is EventKind.COMMENT]
        earlier = (_earlier_authors(history, bug, slc.window.start_day, identity)
                   if prior_scope == "global" else ())
        bug_nodes, bug_edges = bug_contribution(reporter, commenters, earlier)
        nodes |= bug_nodes
        edges.update(bug_edges)
    if orphans:
        log.debug("window %s: %d orphan bugs", slc.window.index, len(orphans))
    return InteractionGraph(frozenset(nodes), dict(edges), slc.window, tuple(orphans))


class SlidingGraphBuilder:
    """Maintains the window graph under day-by-day slides.

    Only bugs with entering or leaving events are recomputed; their old
    contribution is subtracted and the new one added.
    """

    def __init__(self, elog: EventLog, identity: IdentityTable, prior_scope: str = "window"):
        if prior_scope not in PRIOR_SCOPES:
            raise ValueError(f"prior_scope must be one of {PRIOR_SCOPES}")
        self.elog = elog
        self.identity = identity
        self.prior_scope = prior_scope
        self._bug_events: dict[str, deque[BugEvent]] = defaultdict(deque)
        self._bug_state: dict[str, tuple[set[str], Counter]] = {}
        self._edges: Counter = Counter()
        self._nodes: Counter = Counter()
        self._lo = self._hi = 0
        self.window: WindowSpec | None = None

    def _reporter(self, bug: str) -> str | None:
        rec = self.elog.index.get(bug)
        if rec is None or rec.reporter is None:
            return None
        return self.identity.alias(rec.reporter)

    def _recompute(self, bug: str) -> None:
        old = self._bug_state.pop(bug, None)
        if old is not None:
            self._nodes.subtract(old[0])
            self._edges.subtract(old[1])
        evs = self._bug_events.get(bug)
        if not evs:
            self._bug_events.pop(bug, None)
            return
        commenters = [self.identity.alias(e.author_raw) for e in evs if e.kind is EventKind.COMMENT]
        earlier = (_earlier_authors(self.elog, bug, self.window.start_day, self.identity)
                   if self.prior_scope == "global" else ())
        state = bug_contribution(self._reporter(bug), commenters, earlier)
        self._bug_state[bug] = state
        self._nodes.update(state[0])
        self._edges.update(state[1])

    def advance(self, window: WindowSpec, lo: int, hi: int) -> InteractionGraph:
        """Move to ``window`` whose events are ``elog.events[lo:hi]``."""
        events = self.elog.events
        touched = set()
        for e in events[self._lo:min(lo, self._hi)]:
            self._bug_events[e.bug_id].popleft()
            touched.add(e.bug_id)
        for e in events[max(self._hi, lo):hi]:
            self._bug_events[e.bug_id].append(e)
            touched.add(e.bug_id)
        global_shift = self.prior_scope == "global" and self.window is not None
        self._lo, self._hi, self.window = lo, hi, window
        if global_shift:
            # earlier-comment sets move with the start day for every live bug
            touched |= set(self._bug_events)
        for bug in sorted(touched):
            self._recompute(bug)
        self._edges = +self._edges
        self._nodes = +self._nodes
        return self.graph()

    def graph(self) -> InteractionGraph:
        orphans = tuple(sorted(b for b in self._bug_state if self._reporter(b) is None))
        return InteractionGraph(frozenset(self._nodes), dict(self._edges), self.window, orphans)


def iter_graphs(elog: EventLog, identity: IdentityTable, windows: Sequence[WindowSpec], *,
                prior_scope: str = "window", naive: bool = False) -> Iterator[InteractionGraph]:
    """Graphs for every window, incrementally unless ``naive``."""
    if naive:
        from .windows import events_in_window
        for w in windows:
            yield build_graph(events_in_window(elog, w), identity,
                              prior_scope=prior_scope, history=elog)
        return
    builder = SlidingGraphBuilder(elog, identity, prior_scope)
    for w, lo, hi in iter_window_bounds(elog, windows):
        yield builder.advance(w, lo, hi)


def write_edge_list(g: InteractionGraph, path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["u", "v", "weight"])
        w.writerows(g.edge_list())
