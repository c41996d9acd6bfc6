import itertools
import random
from collections import deque

import pytest
from hypothesis import given, strategies as st

from dappnet.graph import WeightedDigraph
from dappnet.metrics import (
    avg_path_length,
    betweenness,
    clustering,
    components,
    degree_stats,
    density,
    diameter,
    selfloop_only_ratio,
    transitivity_by_census,
)
from dappnet.metrics.paths import as_adjacency, is_connected
from dappnet.netbuild import BipartiteCallMatrix, project_functions

from conftest import random_undirected


def graph(edges, nodes=()):
    g = WeightedDigraph(list(nodes))
    for u, v in edges:
        g.add_edge(u, v)
    return g


def path(n):
    return graph([(i, i + 1) for i in range(n - 1)])


def complete(n):
    return graph([(i, j) for i in range(n) for j in range(i + 1, n)])


def star(leaves):
    return graph([("hub", i) for i in range(leaves)])


def test_degree_examples():
    assert degree_stats(graph([("a", "a")])) == {2: 1}
    assert degree_stats(graph([(0, 1), (1, 2), (2, 0)])) == {2: 3}


def test_degree_of_projected_toy():
    m = BipartiteCallMatrix.from_dense(["F1", "F2", "F3", "F4"], ["C1", "C2", "C3"],
                                       [[3, 0, 1], [1, 2, 0], [0, 1, 0], [0, 4, 2]])
    g = project_functions(m)
    # hand count: F1 links F1,F2,F4; F2 links F1,F2,F3,F4; F3 links F2,F3,F4; F4 links F1..F4
    # every pair is reciprocal, so degree = 2 * (neighbours) with the loop adding 2
    assert degree_stats(g) == {6: 2, 8: 2}


def test_density_examples():
    k4 = graph([(u, v) for u in range(4) for v in range(4) if u != v])
    assert density(k4) == 1.0
    assert density(graph([("A", "B"), ("B", "A"), ("A", "A"), ("B", "B")])) == 2.0
    assert density(graph([("a", "a")])) == 1.0
    assert density(graph([], nodes=["a"])) == 0.0


def test_selfloop_only_ratio_examples():
    g = graph([(f"s{i}", f"s{i}") for i in range(6)] + [(0, 1), (1, 2), (2, 3), (3, 0)])
    assert selfloop_only_ratio(g) == pytest.approx(0.6)
    assert selfloop_only_ratio(path(4)) == 0.0
    assert selfloop_only_ratio(graph([("a", "a"), ("b", "b")])) == 1.0


def test_components_examples():
    assert len(components(graph([(0, 1), (2, 3)]))) == 2
    g = graph([(i, i + 1) for i in range(5)] + [("x", "y"), ("z", "z")])
    sizes = [len(c) for c in components(g)]
    assert sizes == [6, 2, 1]
    assert components(WeightedDigraph()) == []


def test_direction_ignored_for_components():
    assert len(components(graph([(0, 1), (2, 1)]))) == 1


def test_paths_examples():
    assert diameter(path(4)) == 3
    assert avg_path_length(path(4)) == pytest.approx(5 / 3)
    assert diameter(complete(5)) == 1 and avg_path_length(complete(5)) == 1.0
    assert diameter(star(4)) == 2
    single = graph([], nodes=["a"])
    assert diameter(single) == 0 and avg_path_length(single) == 0.0


def test_betweenness_examples():
    assert betweenness(path(3))[1] == pytest.approx(1.0)
    assert all(v == 0 for v in betweenness(complete(5)).values())
    bc = betweenness(star(5))
    assert bc["hub"] == pytest.approx(1.0)
    assert all(bc[i] == 0 for i in range(5))
    assert all(v == 0 for v in betweenness(path(2)).values())


def test_clustering_examples():
    local, glob = clustering(complete(3))
    assert set(local.values()) == {1.0} and glob == 1.0
    local, glob = clustering(star(4))
    assert set(local.values()) == {0.0} and glob == 0.0
    # K4 minus edge 2-3: triangles {0,1,2}, {0,1,3}; triples 3+3+1+1 = 8
    k4_minus = graph([(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)])
    local, glob = clustering(k4_minus)
    assert glob == pytest.approx(3 * 2 / 8)
    assert local == pytest.approx({0: 2 / 3, 1: 2 / 3, 2: 1.0, 3: 1.0})


def test_self_loops_ignored_by_path_metrics():
    g = path(3)
    g.add_edge(1, 1)
    assert betweenness(g)[1] == pytest.approx(1.0)
    assert clustering(g)[0][1] == 0.0


def _all_shortest_paths(adj, s, t):
    """Every shortest s-t path by breadth-first enumeration."""
    best, out = None, []
    queue = deque([[s]])
    while queue:
        p = queue.popleft()
        if best is not None and len(p) > best:
            break
        if p[-1] == t:
            best = len(p)
            out.append(p)
            continue
        for v in adj[p[-1]]:
            if v not in p:
                queue.append(p + [v])
    return out


def brute_betweenness(g):
    adj = as_adjacency(g)
    nodes = list(adj)
    n = len(nodes)
    score = {v: 0.0 for v in nodes}
    for s, t in itertools.combinations(nodes, 2):
        paths = _all_shortest_paths(adj, s, t)
        for v in nodes:
            if v in (s, t):
                continue
            score[v] += sum(v in p for p in paths) / len(paths)
    norm = (n - 1) * (n - 2) / 2 if n > 2 else 1.0
    return {v: x / norm for v, x in score.items()}


def test_betweenness_matches_brute_force_small_sample():
    rng = random.Random(11)
    checked = 0
    while checked < 60:
        g = random_undirected(rng, rng.randint(3, 7), rng.uniform(0.3, 0.8))
        if not is_connected(as_adjacency(g)):
            continue
        got, want = betweenness(g), brute_betweenness(g)
        for v in want:
            assert got[v] == pytest.approx(want[v], abs=1e-12)
        checked += 1


@given(st.randoms(use_true_random=False), st.integers(2, 12), st.floats(0.2, 1.0))
def test_transitivity_two_ways(rnd, n, p):
    g = random_undirected(rnd, n, p)
    assert clustering(g)[1] == pytest.approx(transitivity_by_census(g), abs=1e-12)


@given(st.randoms(use_true_random=False), st.integers(2, 12), st.floats(0.3, 1.0))
def test_diameter_bounds_average(rnd, n, p):
    g = random_undirected(rnd, n, p)
    comp = g.subgraph(components(g)[0])
    if comp.n_nodes >= 2:
        assert diameter(comp) >= avg_path_length(comp) >= 1.0


def test_disconnected_average_path_raises():
    with pytest.raises(ValueError):
        avg_path_length(graph([(0, 1), (2, 3)]))
