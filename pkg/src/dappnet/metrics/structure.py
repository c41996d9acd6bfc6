"""Degree histograms, density and self-loop ratios of directed networks."""

from __future__ import annotations

from collections import Counter
from typing import Dict

from dappnet.graph import WeightedDigraph


def degree_sequence(g: WeightedDigraph) -> Dict[object, int]:
    """Total degree (in + out); a self-loop adds 2."""
    deg = {n: 0 for n in g.nodes}
    for u, v in g.edges:
        deg[u] += 1
        deg[v] += 1
    return deg


def degree_stats(g: WeightedDigraph) -> Dict[int, int]:
    return dict(sorted(Counter(degree_sequence(g).values()).items()))


def density(g: WeightedDigraph) -> float:
    """Edges over n(n-1); self-loops count as edges, so values above 1 occur.

    A single node has density 1.0 when it carries a self-loop, else 0.0.
    """
    n = g.n_nodes
    if n == 0:
        return 0.0
    if n == 1:
        return 1.0 if g.n_edges else 0.0
    return g.n_edges / (n * (n - 1))


def selfloop_only_ratio(g: WeightedDigraph) -> float:
    """Fraction of nodes whose only incident edges are self-loops."""
    if g.n_nodes == 0:
        return 0.0
    has_loop = set()
    has_other = set()
    for u, v in g.edges:
        if u == v:
            has_loop.add(u)
        else:
            has_other.add(u)
            has_other.add(v)
    return len(has_loop - has_other) / g.n_nodes
