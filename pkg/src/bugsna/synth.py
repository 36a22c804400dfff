"""Synthetic bug-community logs with planted activity patterns.

Planted roles:

* continuous participants answer fresh users' bugs every day (``base_rate``
  per day each), so they are star centres in every window;
* phaser clusters are only active within ``band_days`` of their release
  days; members report bugs, comment on each other's bugs and answer fresh
  users at ``burst_rate`` actions per member per day;
* one-shot participants act on a single day: they report one bug that a
  fresh user comments on, and comment on another fresh user's bug.

Fresh users are leaves of the interaction graph and therefore never have
non-zero betweenness; they are not part of the ground truth.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from datetime import date, datetime, time, timedelta, timezone
from pathlib import Path
from typing import Sequence

import numpy as np

from .activity import ActivityLabel
from .events import EventKind, EventLog, assemble_log

EMAIL_SUFFIX = "....@gmail.com"


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 42
    n_days: int = 200
    n_continuous: int = 5
    n_phaser_clusters: int = 4
    phaser_cluster_size: int = 8
    n_oneshot: int = 20
    release_days: tuple[int, ...] = (20, 45, 70, 95, 120, 145, 170, 195)
    base_rate: float = 1.0
    burst_rate: float = 1.5
    band_days: int = 15
    start_date: date = date(2010, 1, 1)

    def validate(self) -> None:
        counts = (self.n_days, self.n_continuous, self.n_phaser_clusters,
                  self.phaser_cluster_size, self.n_oneshot, self.band_days)
        if any(c < 0 for c in counts):
            raise ValueError("synth counts must be non-negative")
        if self.base_rate < 0 or self.burst_rate < self.base_rate:
            raise ValueError("need 0 <= base_rate <= burst_rate")
        if self.n_phaser_clusters and self.phaser_cluster_size and \
                self.n_phaser_clusters > len(self.release_days):
            raise ValueError(f"{self.n_phaser_clusters} phaser clusters but only "
                             f"{len(self.release_days)} release days")
        if any(not 0 <= d < max(self.n_days, 1) for d in self.release_days):
            raise ValueError("release days must lie inside [0, n_days)")

    @property
    def last_date(self) -> date:
        return self.start_date + timedelta(days=max(self.n_days, 1) - 1)

    def cluster_release_days(self, cluster: int) -> tuple[int, ...]:
        return tuple(self.release_days[cluster::self.n_phaser_clusters])


@dataclass(frozen=True)
class GroundTruth:
    labels: dict[str, ActivityLabel] = field(default_factory=dict)
    clusters: dict[str, int] = field(default_factory=dict)

    def write_csv(self, path: str | Path) -> None:
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["participant", "label", "cluster_id"])
            for p in sorted(self.labels):
                cid = self.clusters.get(p)
                w.writerow([p, self.labels[p].value, "" if cid is None else cid])


def raw_author(alias: str) -> str:
    return alias + EMAIL_SUFFIX


class _Emitter:
    """Accumulates records with strictly increasing in-day timestamps."""

    def __init__(self, start: date):
        self.origin = datetime.combine(start, time(), tzinfo=timezone.utc)
        self.records: list[tuple[EventKind, str, str, datetime]] = []
        self.day = 0
        self.tick = 0
        self.next_bug = 1
        self.next_user = 1

    def at_day(self, day: int) -> None:
        self.day, self.tick = day, 0

    def _ts(self) -> datetime:
        self.tick += 1
        return self.origin + timedelta(days=self.day, seconds=self.tick)

    def report(self, alias: str) -> str:
        bug = str(self.next_bug)
        self.next_bug += 1
        self.records.append((EventKind.REPORT, bug, raw_author(alias), self._ts()))
        return bug

    def comment(self, alias: str, bug: str) -> None:
        self.records.append((EventKind.COMMENT, bug, raw_author(alias), self._ts()))

    def fresh_user(self) -> str:
        name = f"user{self.next_user:06d}"
        self.next_user += 1
        return name


def generate(config: SynthConfig) -> tuple[EventLog, GroundTruth]:
    config.validate()
    rng = np.random.Generator(np.random.PCG64(config.seed))
    em = _Emitter(config.start_date)
    labels: dict[str, ActivityLabel] = {}
    clusters: dict[str, int] = {}

    continuous = [f"core{i:02d}" for i in range(config.n_continuous)]
    for c in continuous:
        labels[c] = ActivityLabel.CONTINUOUS
        clusters[c] = config.n_phaser_clusters

    groups = []
    for g in range(config.n_phaser_clusters):
        members = [f"ph{g:02d}m{m:02d}" for m in range(config.phaser_cluster_size)]
        n_bands = len(config.cluster_release_days(g))
        for m in members:
            labels[m] = ActivityLabel.PHASER if n_bands > 1 else ActivityLabel.ONE_TIME
            clusters[m] = g
        groups.append(members)

    oneshots = [f"once{i:04d}" for i in range(config.n_oneshot)]
    oneshot_day = {}
    for o in oneshots:
        labels[o] = ActivityLabel.ONE_TIME
        oneshot_day[o] = int(rng.integers(config.n_days)) if config.n_days else 0

    band_bugs: list[list[str]] = [[] for _ in groups]
    for day in range(config.n_days):
        em.at_day(day)
        for c in continuous:
            for _ in range(rng.poisson(config.base_rate)):
                bug = em.report(em.fresh_user())
                em.comment(c, bug)

        for g, members in enumerate(groups):
            active = any(abs(day - r) <= config.band_days for r in config.cluster_release_days(g))
            if not active:
                band_bugs[g] = []
                continue
            for m in members:
                for _ in range(rng.poisson(config.burst_rate)):
                    action = rng.random()
                    if action < 1 / 3 or (action < 2 / 3 and not band_bugs[g]):
                        band_bugs[g].append(em.report(m))
                    elif action < 2 / 3:
                        em.comment(m, band_bugs[g][int(rng.integers(len(band_bugs[g])))])
                    else:
                        em.comment(m, em.report(em.fresh_user()))

        for o in oneshots:
            if oneshot_day[o] == day:
                bug = em.report(o)
                em.comment(em.fresh_user(), bug)
                em.comment(o, em.report(em.fresh_user()))

    elog = assemble_log(em.records)
    if config.n_days:
        elog = EventLog(elog.events, elog.index, (config.start_date, config.last_date))
    return elog, GroundTruth(labels, clusters)


def planted_groups(truth: GroundTruth, participants: Sequence[str]) -> list[int | None]:
    return [truth.clusters.get(p) for p in participants]
