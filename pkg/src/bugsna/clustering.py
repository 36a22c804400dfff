"""Spherical K-means under cosine distance, and heatmap row ordering."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .activity import CentralityMatrix

OBJECTIVE_SLACK = 1e-9


def cosine_distance(a: Sequence[float], b: Sequence[float]) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch {a.shape} vs {b.shape}")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ValueError("cosine distance undefined for a zero vector")
    sim = float(np.dot(a, b) / (na * nb))
    return 1.0 - min(1.0, max(-1.0, sim))


@dataclass(frozen=True)
class ClusterAssignment:
    k: int
    participants: tuple[str, ...]
    labels: np.ndarray
    centroids: np.ndarray
    seed: int
    iterations_run: int
    objective: float
    objective_trace: tuple[float, ...] = ()

    @property
    def assignment(self) -> dict[str, int]:
        return {p: int(c) for p, c in zip(self.participants, self.labels)}

    def members(self, cluster_id: int) -> list[str]:
        return [p for p, c in zip(self.participants, self.labels) if c == cluster_id]


def _unit_rows(x: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(x, axis=1, keepdims=True)
    if np.any(norms == 0):
        raise ValueError("cosine k-means needs rows with non-zero norm")
    return x / norms


def _distances(unit_x: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    return 1.0 - np.clip(unit_x @ centroids.T, -1.0, 1.0)


def _plus_plus_init(unit_x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = unit_x.shape[0]
    chosen = [int(rng.integers(n))]
    closest = _distances(unit_x, unit_x[chosen])[:, 0]
    for _ in range(1, k):
        weights = closest ** 2
        weights[chosen] = 0.0
        total = weights.sum()
        if total > 0:
            nxt = int(rng.choice(n, p=weights / total))
        else:
            # every remaining row duplicates a chosen one
            free = np.setdiff1d(np.arange(n), chosen)
            nxt = int(free[rng.integers(len(free))])
        chosen.append(nxt)
        closest = np.minimum(closest, _distances(unit_x, unit_x[[nxt]])[:, 0])
    return unit_x[chosen].copy()


def _repair_empty(labels: np.ndarray, dist_to_own: np.ndarray, k: int) -> None:
    """Move the point farthest from its centroid into each empty cluster."""
    for c in range(k):
        sizes = np.bincount(labels, minlength=k)
        if sizes[c]:
            continue
        movable = sizes[labels] > 1
        cand = np.where(movable, dist_to_own, -np.inf)
        i = int(np.argmax(cand))
        labels[i] = c
        dist_to_own[i] = 0.0


def _update_centroids(unit_x: np.ndarray, labels: np.ndarray, old: np.ndarray) -> np.ndarray:
    new = old.copy()
    for c in range(old.shape[0]):
        members = unit_x[labels == c]
        if len(members) == 0:
            continue
        mean = members.sum(axis=0) / len(members)
        norm = np.linalg.norm(mean)
        if norm > 0:
            new[c] = mean / norm
    return new


def kmeans(matrix: CentralityMatrix | np.ndarray, k: int, seed: int = 0, max_iter: int = 300,
           participants: Sequence[str] | None = None) -> ClusterAssignment:
    """Cluster rows by direction.

    Rows are scaled to unit length first (cosine distance ignores scale), so
    the renormalized member mean is the exact minimizer of summed cosine
    distance and the objective cannot increase between iterations.
    """
    if isinstance(matrix, CentralityMatrix):
        x, participants = matrix.values, matrix.participants
    else:
        x = np.asarray(matrix, dtype=float)
        participants = participants if participants is not None else [str(i) for i in range(len(x))]
    n = x.shape[0]
    if k <= 0:
        raise ValueError("k must be positive")
    if k > n:
        raise ValueError(f"k={k} exceeds the number of rows ({n})")
    unit_x = _unit_rows(x)
    rng = np.random.Generator(np.random.PCG64(seed))
    centroids = _plus_plus_init(unit_x, k, rng)

    labels = np.argmin(_distances(unit_x, centroids), axis=1)
    trace = []
    iterations = 0
    for iterations in range(1, max_iter + 1):
        dist_to_own = _distances(unit_x, centroids)[np.arange(n), labels]
        _repair_empty(labels, dist_to_own, k)
        centroids = _update_centroids(unit_x, labels, centroids)
        d = _distances(unit_x, centroids)
        objective = float(d[np.arange(n), labels].sum())
        if trace and objective > trace[-1] + OBJECTIVE_SLACK:
            raise AssertionError(f"objective increased: {trace[-1]} -> {objective}")
        trace.append(objective)
        new_labels = np.argmin(d, axis=1)
        # keep the current label on exact ties so assignment never oscillates
        keep = d[np.arange(n), labels] <= d[np.arange(n), new_labels]
        new_labels = np.where(keep, labels, new_labels)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels

    final = float(_distances(unit_x, centroids)[np.arange(n), labels].sum())
    return ClusterAssignment(k, tuple(participants), labels.copy(), centroids, seed,
                             iterations, final, tuple(trace))


def order_rows_for_heatmap(assignment: ClusterAssignment, matrix: CentralityMatrix) -> list[str]:
    """Clusters by the window of their centroid's peak, rows by coverage then name."""
    pos = {p: i for i, p in enumerate(matrix.participants)}
    coverage = {p: float(np.count_nonzero(matrix.values[pos[p]])) for p in assignment.participants}
    order = []
    peaks = sorted(range(assignment.k), key=lambda c: (int(np.argmax(assignment.centroids[c])), c))
    for c in peaks:
        members = assignment.members(c)
        order.extend(sorted(members, key=lambda p: (-coverage[p], p)))
    return order


def pair_counting_agreement(a: Sequence, b: Sequence) -> float:
    """Rand index: fraction of item pairs on which two labelings agree."""
    if len(a) != len(b):
        raise ValueError("labelings differ in length")
    pairs = agree = 0
    for i, j in combinations(range(len(a)), 2):
        pairs += 1
        agree += (a[i] == a[j]) == (b[i] == b[j])
    return 1.0 if pairs == 0 else agree / pairs


def write_clusters_csv(assignment: ClusterAssignment, path: str | Path, order: Sequence[str] | None = None) -> None:
    mapping = assignment.assignment
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["participant", "cluster_id"])
        for p in (order if order is not None else sorted(mapping)):
            w.writerow([p, mapping[p]])


def write_centroids_csv(assignment: ClusterAssignment, path: str | Path) -> None:
    width = assignment.centroids.shape[1]
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["cluster_id"] + [f"w{j}" for j in range(width)])
        for c, row in enumerate(assignment.centroids):
            w.writerow([c] + [repr(float(v)) for v in row])


def clusters_by_id(assignment: ClusterAssignment) -> Mapping[int, list[str]]:
    return {c: assignment.members(c) for c in range(assignment.k)}
