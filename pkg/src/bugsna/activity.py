"""Participant x window centrality matrix, run detection and activity labels."""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .centrality import CentralityRecord
from .windows import WindowSpec

DEFAULT_CONTINUOUS_THRESHOLD = 0.90


class ActivityLabel(str, enum.Enum):
    ONE_TIME = "OneTime"
    PHASER = "Phaser"
    CONTINUOUS = "Continuous"


class ConsistencyError(ValueError):
    pass


@dataclass(frozen=True)
class CentralityMatrix:
    participants: tuple[str, ...]
    windows: tuple[WindowSpec, ...]
    values: np.ndarray
    # participants seen in any window graph, before the all-zero filter
    n_seen: int = field(default=0, compare=False)

    def __post_init__(self):
        if self.values.shape != (len(self.participants), len(self.windows)):
            raise ConsistencyError(
                f"values shape {self.values.shape} != ({len(self.participants)}, {len(self.windows)})")

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def row(self, participant: str) -> np.ndarray:
        return self.values[self.participants.index(participant)]

    def take(self, participants: Sequence[str]) -> "CentralityMatrix":
        pos = {p: i for i, p in enumerate(self.participants)}
        idx = [pos[p] for p in participants]
        return CentralityMatrix(tuple(participants), self.windows, self.values[idx], self.n_seen)


@dataclass(frozen=True)
class ActivityPattern:
    participant: str
    runs: tuple[tuple[int, int], ...]
    coverage: float
    label: ActivityLabel

    @property
    def run_count(self) -> int:
        return len(self.runs)


def assemble_matrix(records: Iterable[CentralityRecord], windows: Sequence[WindowSpec]) -> CentralityMatrix:
    """Dense matrix of normalized betweenness with all-zero participants dropped."""
    windows = tuple(windows)
    col = {w.index: j for j, w in enumerate(windows)}
    seen: set[str] = set()
    nonzero: dict[str, dict[int, float]] = {}
    for r in records:
        if r.window_index not in col:
            raise ConsistencyError(f"record for unknown window {r.window_index}")
        seen.add(r.participant)
        if r.normalized_b > 0:
            nonzero.setdefault(r.participant, {})[col[r.window_index]] = r.normalized_b
    participants = tuple(sorted(nonzero))
    values = np.zeros((len(participants), len(windows)))
    for i, p in enumerate(participants):
        for j, v in nonzero[p].items():
            values[i, j] = v
    return CentralityMatrix(participants, windows, values, len(seen))


def detect_runs(row: Sequence[float]) -> list[tuple[int, int]]:
    """Maximal ``[first, last]`` index intervals where the value is non-zero."""
    runs = []
    start = None
    for i, v in enumerate(row):
        if v > 0:
            if start is None:
                start = i
        elif start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, len(row) - 1))
    return runs


def classify(runs: Sequence[tuple[int, int]], coverage: float,
             continuous_threshold: float = DEFAULT_CONTINUOUS_THRESHOLD) -> ActivityLabel:
    if not runs:
        raise ValueError("participant has no non-zero run")
    if coverage >= continuous_threshold:
        return ActivityLabel.CONTINUOUS
    if len(runs) == 1:
        return ActivityLabel.ONE_TIME
    return ActivityLabel.PHASER


def activity_patterns(matrix: CentralityMatrix,
                      continuous_threshold: float = DEFAULT_CONTINUOUS_THRESHOLD) -> list[ActivityPattern]:
    out = []
    n_windows = max(len(matrix.windows), 1)
    for p, row in zip(matrix.participants, matrix.values):
        runs = detect_runs(row)
        coverage = float(np.count_nonzero(row)) / n_windows
        out.append(ActivityPattern(p, tuple(runs), coverage, classify(runs, coverage, continuous_threshold)))
    return out


def label_counts(patterns: Iterable[ActivityPattern]) -> dict[ActivityLabel, int]:
    counts = dict.fromkeys(ActivityLabel, 0)
    for pat in patterns:
        counts[pat.label] += 1
    return counts


def summary_series(matrix: CentralityMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Active participants and summed betweenness per window."""
    values = matrix.values
    if values.size == 0:
        zeros = np.zeros(len(matrix.windows))
        return zeros.astype(int), zeros
    return np.count_nonzero(values > 0, axis=0), values.sum(axis=0)


def local_maxima(series: Sequence[float], radius: int = 1) -> list[int]:
    """Indices that are the maximum of their ``radius`` neighbourhood and non-zero."""
    s = np.asarray(series, dtype=float)
    peaks = []
    for i in range(len(s)):
        lo, hi = max(0, i - radius), min(len(s), i + radius + 1)
        if s[i] > 0 and s[i] == s[lo:hi].max() and (i == lo or s[i] > s[i - 1]):
            peaks.append(i)
    return peaks


def write_patterns_csv(patterns: Iterable[ActivityPattern], path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["participant", "label", "run_count", "coverage"])
        for pat in sorted(patterns, key=lambda p: p.participant):
            w.writerow([pat.participant, pat.label.value, pat.run_count, repr(pat.coverage)])


def write_summary_csv(matrix: CentralityMatrix, path: str | Path,
                      releases: Mapping | None = None) -> None:
    """``releases`` maps release day to label; matching windows get an annotation column."""
    counts, sums = summary_series(matrix)
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        header = ["window_index", "active_count", "betweenness_sum"]
        if releases is not None:
            header.append("releases")
        w.writerow(header)
        for j, win in enumerate(matrix.windows):
            row = [win.index, int(counts[j]), repr(float(sums[j]))]
            if releases is not None:
                row.append(";".join(label for day, label in sorted(releases.items()) if win.contains(day)))
            w.writerow(row)


def write_matrix_csv(matrix: CentralityMatrix, path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["participant"] + [f"w{win.index}" for win in matrix.windows])
        for p, row in zip(matrix.participants, matrix.values):
            w.writerow([p] + [repr(float(v)) for v in row])
