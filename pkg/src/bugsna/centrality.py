"""Betweenness centrality on weighted interaction graphs.

``betweenness`` runs one Dijkstra per source and back-propagates pair
dependencies (Brandes 2001). ``betweenness_bruteforce`` enumerates simple
paths and is only meant as a test oracle for small graphs.
"""

from __future__ import annotations

import csv
import heapq
from dataclasses import dataclass
from fractions import Fraction
from itertools import count
from pathlib import Path
from typing import Iterable

from .graph import InteractionGraph

DISTANCE_MODES = ("unit", "weight", "inverse_weight")
TIE_RTOL = 1e-12
BRUTEFORCE_MAX_NODES = 10


@dataclass(frozen=True)
class CentralityRecord:
    participant: str
    window_index: int
    raw_b: float
    normalized_b: float


def _length(weight: int, mode: str):
    if mode == "unit":
        return 1
    if mode == "weight":
        return weight
    if mode == "inverse_weight":
        return 1.0 / weight
    raise ValueError(f"distance_mode must be one of {DISTANCE_MODES}, got {mode!r}")


def _close(a, b, rtol: float) -> bool:
    if rtol == 0:
        return a == b
    return abs(a - b) <= rtol * max(abs(a), abs(b))


def _single_source(adj, source, rtol):
    """Dijkstra from ``source``: settle order, path counts and geodesic predecessors."""
    dist = {source: 0}
    preds: dict[str, list[str]] = {source: []}
    sigma: dict[str, int] = {}
    settled: list[str] = []
    done = set()
    tie = count()
    heap = [(0, next(tie), source)]
    while heap:
        _, _, v = heapq.heappop(heap)
        if v in done:
            continue
        done.add(v)
        settled.append(v)
        sigma[v] = 1 if v == source else sum(sigma[p] for p in preds[v])
        dv = dist[v]
        for w, length in adj[v]:
            if w in done:
                continue
            nd = dv + length
            cur = dist.get(w)
            if cur is None or (nd < cur and not _close(nd, cur, rtol)):
                dist[w] = nd
                preds[w] = [v]
                heapq.heappush(heap, (nd, next(tie), w))
            elif _close(nd, cur, rtol):
                preds[w].append(v)
    return settled, preds, sigma


def _absorb_leaves(adj):
    """Fold degree-1 vertices into their neighbours, repeatedly.

    Returns the reduced adjacency, the number of original vertices each
    survivor stands for, the component size of every vertex, and the ordered
    pair counts already credited to absorbing vertices. Every geodesic from
    an absorbed vertex runs through its neighbour, whatever the edge lengths,
    so these credits are exact.
    """
    comp_size = {}
    for start in adj:
        if start in comp_size:
            continue
        members, stack = [start], [start]
        comp_size[start] = 0
        while stack:
            v = stack.pop()
            for w, _ in adj[v]:
                if w not in comp_size:
                    comp_size[w] = 0
                    members.append(w)
                    stack.append(w)
        for v in members:
            comp_size[v] = len(members)

    live = {v: dict(nbrs) for v, nbrs in adj.items()}
    mult = dict.fromkeys(adj, 1)
    credit = dict.fromkeys(adj, 0.0)
    queue = sorted(v for v, nbrs in live.items() if len(nbrs) == 1)
    while queue:
        v = queue.pop()
        if len(live.get(v, ())) != 1:
            continue
        (u,) = live[v]
        n_c = comp_size[v]
        # v lies between its absorbed vertices and everything outside its set
        credit[v] += 2.0 * (mult[v] - 1) * (n_c - mult[v])
        # u lies between v's set and the sets u absorbed earlier
        credit[u] += 2.0 * mult[v] * (mult[u] - 1)
        mult[u] += mult[v]
        del live[u][v]
        del live[v]
        if len(live[u]) == 1:
            queue.append(u)
    for s in live:
        credit[s] += 2.0 * (mult[s] - 1) * (comp_size[s] - mult[s])
    reduced = {v: sorted(nbrs.items()) for v, nbrs in live.items()}
    return reduced, mult, credit


def betweenness(g: InteractionGraph, distance_mode: str = "weight",
                prune_leaves: bool = True) -> dict[str, float]:
    """Raw betweenness of every node (unordered pairs, endpoints excluded).

    With ``prune_leaves`` the tree-like fringe is folded away first and the
    Brandes pass runs on the remaining core with vertex multiplicities.
    """
    rtol = TIE_RTOL if distance_mode == "inverse_weight" else 0
    adj = {v: [(w, _length(wt, distance_mode)) for w, wt in nbrs]
           for v, nbrs in g.adjacency().items()}
    if prune_leaves:
        core, mult, bc = _absorb_leaves(adj)
    else:
        core, mult, bc = adj, dict.fromkeys(adj, 1), dict.fromkeys(adj, 0.0)
    for s in core:
        if not core[s]:
            continue
        settled, preds, sigma = _single_source(core, s, rtol)
        delta = dict.fromkeys(settled, 0.0)
        weight_s = mult[s]
        for w in reversed(settled):
            coeff = (mult[w] + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                bc[w] += weight_s * delta[w]
    # ordered pairs -> unordered
    return {v: b / 2.0 for v, b in bc.items()}


def _exact_length(weight: int, mode: str):
    if mode == "unit":
        return 1
    if mode == "weight":
        return weight
    if mode == "inverse_weight":
        return Fraction(1, weight)
    raise ValueError(f"distance_mode must be one of {DISTANCE_MODES}, got {mode!r}")


def betweenness_bruteforce(g: InteractionGraph, distance_mode: str = "weight",
                           max_nodes: int = BRUTEFORCE_MAX_NODES) -> dict[str, float]:
    """Betweenness by enumerating simple paths, in exact arithmetic.

    A partial path is abandoned once it is strictly longer than some path
    already seen to the same node: with positive lengths every prefix of a
    geodesic is itself a geodesic, so no shortest path is lost.
    """
    if g.n > max_nodes:
        raise ValueError(f"brute force limited to {max_nodes} nodes, graph has {g.n}")
    adj = {v: [(w, _exact_length(wt, distance_mode)) for w, wt in nbrs]
           for v, nbrs in g.adjacency().items()}
    nodes = sorted(adj)
    rank = {v: i for i, v in enumerate(nodes)}
    total = {v: Fraction(0) for v in nodes}
    for src in nodes:
        # target -> (best distance, list of interior node tuples)
        best: dict[str, tuple[object, list[tuple[str, ...]]]] = {}
        reach = {src: 0}
        path = [src]
        on_path = {src}

        def walk(v, d):
            for w, length in adj[v]:
                if w in on_path:
                    continue
                nd = d + length
                if w in reach and nd > reach[w]:
                    continue
                reach[w] = nd if w not in reach else min(reach[w], nd)
                if rank[w] > rank[src]:
                    cur = best.get(w)
                    interior = tuple(path[1:])
                    if cur is None or nd < cur[0]:
                        best[w] = (nd, [interior])
                    elif nd == cur[0]:
                        cur[1].append(interior)
                path.append(w)
                on_path.add(w)
                walk(w, nd)
                path.pop()
                on_path.discard(w)

        walk(src, 0)
        for dst, (_, interiors) in best.items():
            g_ij = len(interiors)
            for k in nodes:
                g_ijk = sum(1 for p in interiors if k in p)
                if g_ijk:
                    total[k] += Fraction(g_ijk, g_ij)
    return {v: float(b) for v, b in total.items()}


def normalize(raw_b: float, n: int) -> float:
    """Divide by the pair count ``(n-1)(n-2)/2``; 0 when n < 3."""
    if n < 3:
        return 0.0
    return raw_b / ((n - 1) * (n - 2) / 2)


def window_centrality(g: InteractionGraph, distance_mode: str = "weight",
                      window_index: int | None = None) -> list[CentralityRecord]:
    if window_index is None:
        window_index = g.window.index if g.window is not None else 0
    raw = betweenness(g, distance_mode)
    return [CentralityRecord(v, window_index, raw[v], normalize(raw[v], g.n)) for v in sorted(raw)]


def write_centrality_csv(records: Iterable[CentralityRecord], path: str | Path) -> None:
    rows = sorted(records, key=lambda r: (r.window_index, r.participant))
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["window_index", "participant", "raw_b", "normalized_b"])
        for r in rows:
            w.writerow([r.window_index, r.participant, repr(r.raw_b), repr(r.normalized_b)])
