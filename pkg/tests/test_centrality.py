import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bugsna.centrality import (DISTANCE_MODES, betweenness, betweenness_bruteforce, normalize,
                               window_centrality, write_centrality_csv)
from bugsna.cli import random_graph
from bugsna.graph import InteractionGraph

PATH = InteractionGraph.from_edges([("A", "B", 1), ("B", "C", 1)])
STAR = InteractionGraph.from_edges([("C", leaf, 1) for leaf in "1234"])
CYCLE = InteractionGraph.from_edges([("A", "B", 1), ("B", "C", 1), ("C", "D", 1), ("D", "A", 1)])


@pytest.mark.parametrize("fn", [betweenness, betweenness_bruteforce])
@pytest.mark.parametrize("mode", DISTANCE_MODES)
def test_path(fn, mode):
    assert fn(PATH, mode) == {"A": 0, "B": 1, "C": 0}


@pytest.mark.parametrize("fn", [betweenness, betweenness_bruteforce])
def test_star(fn):
    b = fn(STAR)
    assert b["C"] == 6 and all(b[leaf] == 0 for leaf in "1234")
    assert normalize(b["C"], STAR.n) == 1.0


@pytest.mark.parametrize("fn", [betweenness, betweenness_bruteforce])
def test_four_cycle(fn):
    b = fn(CYCLE, "unit")
    assert all(math.isclose(v, 0.5, abs_tol=1e-12) for v in b.values())
    assert math.isclose(normalize(b["A"], 4), 0.5 / 3, abs_tol=1e-12)


def test_weights_change_geodesics():
    # the heavy direct edge is "long" in weight mode, short in inverse mode
    g = InteractionGraph.from_edges([("a", "c", 3), ("a", "b", 1), ("b", "c", 1)])
    assert betweenness(g, "weight")["b"] == 1
    assert betweenness(g, "unit")["b"] == 0
    assert betweenness(g, "inverse_weight")["b"] == 0


def test_disconnected_pairs_contribute_nothing():
    g = InteractionGraph.from_edges([("a", "b", 1), ("b", "c", 1), ("x", "y", 1)], nodes=["lonely"])
    b = betweenness(g)
    assert b == {"a": 0, "b": 1, "c": 0, "x": 0, "y": 0, "lonely": 0}
    recs = {r.participant: r for r in window_centrality(g, window_index=3)}
    assert recs["b"].normalized_b == pytest.approx(1 / 10)  # n = 6


def test_empty_graph():
    assert betweenness(InteractionGraph(frozenset(), {})) == {}


@pytest.mark.parametrize("raw,n,expected", [(6, 5, 1.0), (0, 7, 0.0), (0.5, 4, 0.5 / 3), (3, 2, 0.0), (0, 0, 0.0)])
def test_normalize(raw, n, expected):
    assert normalize(raw, n) == pytest.approx(expected, abs=1e-12)


def test_bruteforce_guard():
    big = InteractionGraph.from_edges([(f"n{i}", f"n{i + 1}", 1) for i in range(11)])
    with pytest.raises(ValueError):
        betweenness_bruteforce(big)


def test_tree_interior_shares_sum_to_hops():
    rng = random.Random(11)
    for _ in range(50):
        n = rng.randint(2, 30)
        edges = [(f"v{i}", f"v{rng.randrange(i)}", rng.randint(1, 5)) for i in range(1, n)]
        g = InteractionGraph.from_edges(edges)
        adj = g.adjacency()
        hops_total = 0
        for s in adj:
            depth, stack = {s: 0}, [s]
            while stack:
                v = stack.pop()
                for w, _ in adj[v]:
                    if w not in depth:
                        depth[w] = depth[v] + 1
                        stack.append(w)
            hops_total += sum(d - 1 for d in depth.values() if d > 0)
        assert sum(betweenness(g).values()) == pytest.approx(hops_total / 2)


def test_fast_matches_bruteforce_sparse_graphs():
    rng = random.Random(5)
    for _ in range(200):
        n = rng.randint(2, 10)
        edges = [(f"v{i}", f"v{rng.randrange(i)}", rng.randint(1, 5)) for i in range(1, n)]
        edges += [(f"v{rng.randrange(n)}", f"v{rng.randrange(n)}", rng.randint(1, 5)) for _ in range(rng.randint(0, 3))]
        g = InteractionGraph.from_edges([e for e in edges if e[0] != e[1]], nodes=[f"v{i}" for i in range(n)])
        for mode in DISTANCE_MODES:
            slow = betweenness_bruteforce(g, mode)
            for prune in (True, False):
                fast = betweenness(g, mode, prune_leaves=prune)
                assert all(abs(fast[v] - slow[v]) <= 1e-9 for v in g.nodes)


@given(st.integers(0, 10_000), st.integers(2, 7))
@settings(max_examples=60, deadline=None)
def test_scaling_weights_leaves_betweenness_unchanged(seed, factor):
    g = random_graph(random.Random(seed), 12)
    scaled = InteractionGraph(g.nodes, {e: w * factor for e, w in g.edges.items()})
    for mode in ("weight", "inverse_weight"):
        a, b = betweenness(g, mode), betweenness(scaled, mode)
        assert all(math.isclose(a[v], b[v], rel_tol=1e-9, abs_tol=1e-9) for v in g.nodes)


@given(st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_normalized_within_unit_interval(seed):
    g = random_graph(random.Random(seed), 15)
    for r in window_centrality(g, "weight"):
        assert 0.0 <= r.normalized_b <= 1.0 + 1e-12


def test_centrality_csv_sorted(tmp_path):
    recs = window_centrality(PATH, window_index=2) + window_centrality(STAR, window_index=1)
    write_centrality_csv(recs, tmp_path / "c.csv")
    lines = (tmp_path / "c.csv").read_text().splitlines()
    assert lines[0] == "window_index,participant,raw_b,normalized_b"
    assert lines[1] == "1,1,0.0,0.0"
    assert lines[5] == "1,C,6.0,1.0"
    assert lines[7] == "2,B,1.0,1.0"
