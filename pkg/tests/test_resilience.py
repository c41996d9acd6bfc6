import pytest
from hypothesis import given, settings, strategies as st

from dappnet.graph import WeightedDigraph
from dappnet.nullmodels import ring_lattice_rewired
from dappnet.resilience import (
    BETWEENNESS,
    DEFAULT_GRID,
    DEGREE,
    RANDOM,
    DisconnectionRule,
    critical_threshold,
    removal_count,
    removal_experiment,
    static_ranking,
    trace_rows,
)
from dappnet.metrics.paths import as_adjacency

from conftest import barbell


def complete(n):
    g = WeightedDigraph()
    for u in range(n):
        for v in range(u + 1, n):
            g.add_edge(u, v)
    return g


def star(leaves):
    g = WeightedDigraph()
    for i in range(leaves):
        g.add_edge("hub", f"leaf{i:03d}")
    return g


def cycle(n):
    g = WeightedDigraph()
    for i in range(n):
        g.add_edge(i, (i + 1) % n)
    return g


def classic_barbell(k):
    """Two K_k joined through one bridge node adjacent to one node of each."""
    g = WeightedDigraph()
    for side in ("a", "b"):
        for i in range(k):
            for j in range(i + 1, k):
                g.add_edge(f"{side}{i}", f"{side}{j}")
    g.add_edge("a0", "x")
    g.add_edge("x", "b0")
    return g


def test_small_barbell_disconnects_at_first_removal():
    g = classic_barbell(10)
    ranking = static_ranking(as_adjacency(g), BETWEENNESS)
    assert ranking[0] == "x"
    grid = [0.0, 0.05, 0.1]
    t = removal_experiment(g, BETWEENNESS, grid, min_nodes=0)
    assert t.disconnected_at == 0.05
    assert critical_threshold([t], "toy").threshold_fraction == 0.05
    assert critical_threshold([t]).removed_nodes == ["x"]


def test_large_barbell_first_grid_point():
    t = removal_experiment(barbell(50), BETWEENNESS)
    assert t.disconnected_at == 0.01
    assert t.removal_order[0] == "x"


def test_complete_graph_never_disconnects():
    g = complete(60)
    for s in (BETWEENNESS, DEGREE, RANDOM):
        t = removal_experiment(g, s, trials=5)
        assert t.disconnected_at is None
        assert t.avg_path_lengths == pytest.approx([1.0] * len(DEFAULT_GRID))
    assert critical_threshold([removal_experiment(g, BETWEENNESS)]).threshold_fraction is None


def test_star_hub_removal():
    t = removal_experiment(star(100), DEGREE)
    assert t.removal_order[0] == "hub"
    assert t.disconnected_at == 0.01


def test_self_loops_do_not_change_traces():
    g = ring_lattice_rewired(60, 4, 0.1, seed=2)
    looped = g.copy()
    for u in list(g.nodes)[::3]:
        looped.add_edge(u, u, 5.0)
    for s in (BETWEENNESS, RANDOM):
        a = removal_experiment(g, s, trials=10, seed=1)
        b = removal_experiment(looped, s, trials=10, seed=1)
        assert a.avg_path_lengths == b.avg_path_lengths
        assert a.disconnected_at == b.disconnected_at


def test_cycle_random_converges_to_targeted():
    g = cycle(60)
    # 0.02 * 60 removes a single node; on a vertex-transitive graph every
    # single removal leaves the same path, so both traces must agree
    grid = [0.0, 0.02]
    t_rand = removal_experiment(g, RANDOM, grid, trials=200, seed=4)
    t_deg = removal_experiment(g, DEGREE, grid)
    assert t_rand.avg_path_lengths[1] == pytest.approx(t_deg.avg_path_lengths[1], rel=0.10)
    assert t_rand.avg_path_lengths[1] == pytest.approx(20.0)  # path P59: (59 + 1) / 3


@settings(max_examples=20)
@given(st.integers(50, 120), st.integers(0, 1000))
def test_prefix_property(n, seed):
    g = ring_lattice_rewired(n, 4, 0.2, seed)
    t = removal_experiment(g, BETWEENNESS)
    counts = t.removal_counts
    assert counts == sorted(counts)
    assert len(t.removal_order) == max(counts)
    again = removal_experiment(g, BETWEENNESS)
    assert again.removal_order == t.removal_order


def test_removal_count_floor():
    assert removal_count(0.02, 101) == 2
    assert removal_count(0.03, 100) == 3
    assert removal_count(0.0, 100) == 0


def test_grid_and_size_checks():
    g = complete(60)
    with pytest.raises(ValueError):
        removal_experiment(g, BETWEENNESS, [0.0, 0.3])
    with pytest.raises(ValueError):
        removal_experiment(g, BETWEENNESS, [0.1, 0.05])
    with pytest.raises(ValueError):
        removal_experiment(complete(10), BETWEENNESS)
    with pytest.raises(ValueError):
        removal_experiment(g, "pagerank")


def test_disconnection_rule():
    rule = DisconnectionRule()
    assert not rule([95, 1, 1, 1])
    assert rule([80, 20])
    assert rule([97, 2])
    assert not rule([10])


def test_trace_rows_shape():
    t = removal_experiment(barbell(50), RANDOM, [0.0, 0.1], trials=4, seed=0)
    rows = trace_rows(t)
    assert len(rows) == 2 and rows[0][2] == RANDOM
    assert len(t.avg_path_lengths) == len(t.fractions) == len(t.stderr)
