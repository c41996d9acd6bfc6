import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from dappnet.graph import WeightedDigraph
from dappnet.metrics import (
    CliqueBudgetExceeded,
    clique_size_histogram,
    louvain,
    maximal_cliques,
    modularity,
    normalized_histogram,
    undirected_weighted,
)
from dappnet.metrics.paths import as_adjacency

from conftest import random_undirected


def graph(edges):
    g = WeightedDigraph()
    for u, v in edges:
        g.add_edge(u, v)
    return g


def two_cliques():
    a = [(u, v) for u, v in itertools.combinations(range(4), 2)]
    b = [(u, v) for u, v in itertools.combinations(range(4, 8), 2)]
    return graph(a + b + [(3, 4)])


def best_two_partition(g):
    adj = undirected_weighted(g)
    nodes = list(adj)
    best = -1.0
    for mask in range(1, 2 ** (len(nodes) - 1)):
        part = {u: (mask >> i) & 1 for i, u in enumerate(nodes)}
        best = max(best, modularity(adj, part))
    return best


def test_two_cliques_separated():
    g = two_cliques()
    part, q = louvain(g, seed=0)
    assert q > 0.3
    assert len({part[u] for u in range(4)}) == 1
    assert len({part[u] for u in range(4, 8)}) == 1
    assert part[0] != part[4]
    assert q >= best_two_partition(g) - 1e-12


def test_complete_graph_single_community():
    g = graph(itertools.combinations(range(6), 2))
    part, q = louvain(g)
    assert len(set(part.values())) == 1
    assert q == pytest.approx(0.0, abs=1e-12)


def test_two_triangles_two_communities():
    g = graph([(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])
    part, q = louvain(g)
    assert len(set(part.values())) == 2


def test_empty_graph():
    assert louvain(WeightedDigraph()) == ({}, 0.0)


def test_modularity_uses_summed_directions_and_loops():
    g = WeightedDigraph()
    g.add_edge("a", "b", 1.0)
    g.add_edge("b", "a", 2.0)
    g.add_edge("a", "a", 1.0)
    adj = undirected_weighted(g)
    assert adj["a"]["b"] == 3.0 and adj["a"]["a"] == 1.0
    # one community holding everything has Q = 0
    assert modularity(adj, {"a": 0, "b": 0}) == pytest.approx(0.0)


def test_louvain_deterministic():
    rng = random.Random(4)
    g = random_undirected(rng, 40, 0.1)
    assert louvain(g, seed=7) == louvain(g, seed=7)


@settings(max_examples=60)
@given(st.randoms(use_true_random=False), st.integers(1, 25), st.floats(0.05, 0.7))
def test_modularity_range_and_consistency(rnd, n, p):
    g = random_undirected(rnd, n, p)
    part, q = louvain(g, seed=1)
    assert -0.5 <= q <= 1.0
    if g.n_edges:
        assert q == pytest.approx(modularity(undirected_weighted(g), part), abs=1e-12)


def test_clique_examples():
    k4 = graph(itertools.combinations(range(4), 2))
    assert maximal_cliques(k4) == [[0, 1, 2, 3]]
    bowtie = graph([(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)])
    assert clique_size_histogram(bowtie) == {3: 2}


def brute_histogram(g):
    adj = as_adjacency(g)
    nodes = list(adj)
    cliques = []
    for r in range(1, len(nodes) + 1):
        for sub in itertools.combinations(nodes, r):
            if all(v in adj[u] for u, v in itertools.combinations(sub, 2)):
                cliques.append(frozenset(sub))
    maximal = [c for c in cliques if not any(c < d for d in cliques)]
    hist = {}
    for c in maximal:
        if len(c) >= 3:
            hist[len(c)] = hist.get(len(c), 0) + 1
    return dict(sorted(hist.items()))


def test_clique_histogram_brute_force_sample():
    rng = random.Random(2)
    for _ in range(25):
        g = random_undirected(rng, rng.randint(1, 10), rng.uniform(0.2, 0.9))
        assert clique_size_histogram(g) == brute_histogram(g)


def test_clique_budget():
    g = random_undirected(random.Random(0), 30, 0.5)
    with pytest.raises(CliqueBudgetExceeded):
        clique_size_histogram(g, budget=5)


def test_normalized_histogram():
    assert normalized_histogram({3: 4, 5: 1}, 4) == {3: 1.0, 5: 0.25}
    with pytest.raises(ValueError):
        normalized_histogram({3: 1}, 0)
