"""Multi-level greedy modularity optimisation (Louvain)."""

from __future__ import annotations

import random
from typing import Dict, Hashable, List, Mapping, Optional, Tuple

from dappnet.graph import WeightedDigraph

# undirected weighted graph: node -> {neighbour: weight}; a self-loop is
# stored once under adj[u][u]
WeightedAdj = Dict[Hashable, Dict[Hashable, float]]


def undirected_weighted(g: WeightedDigraph) -> WeightedAdj:
    """Both edge directions summed; self-loop weight kept."""
    adj: WeightedAdj = {n: {} for n in g.nodes}
    for (u, v), w in g.undirected_weights().items():
        adj[u][v] = adj[u].get(v, 0.0) + w
        if u != v:
            adj[v][u] = adj[v].get(u, 0.0) + w
    return adj


def _strengths(adj: WeightedAdj) -> Dict[Hashable, float]:
    # a loop adds twice its weight to the node strength
    return {u: sum(w * (2 if v == u else 1) for v, w in nbrs.items()) for u, nbrs in adj.items()}


def _total_weight(adj: WeightedAdj) -> float:
    k = _strengths(adj)
    return sum(k.values()) / 2.0


def modularity(adj: WeightedAdj, partition: Mapping[Hashable, int]) -> float:
    """Q = sum_c [ L_c / m - (K_c / 2m)^2 ]."""
    m = _total_weight(adj)
    if m == 0:
        return 0.0
    k = _strengths(adj)
    internal: Dict[int, float] = {}
    tot: Dict[int, float] = {}
    for u, nbrs in adj.items():
        cu = partition[u]
        tot[cu] = tot.get(cu, 0.0) + k[u]
        for v, w in nbrs.items():
            if partition[v] != cu:
                continue
            # off-diagonal entries are visited from both ends
            internal[cu] = internal.get(cu, 0.0) + (w if v == u else w / 2.0)
    return sum(internal.get(c, 0.0) / m - (t / (2 * m)) ** 2 for c, t in tot.items())


def _one_level(adj: WeightedAdj, order: List[Hashable], m: float) -> Tuple[Dict[Hashable, int], bool]:
    k = _strengths(adj)
    community = {u: i for i, u in enumerate(order)}
    tot = {i: k[u] for i, u in enumerate(order)}
    improved = False
    moved = True
    while moved:
        moved = False
        for u in order:
            cu = community[u]
            links: Dict[int, float] = {}
            for v, w in adj[u].items():
                if v != u:
                    links[community[v]] = links.get(community[v], 0.0) + w
            tot[cu] -= k[u]
            best = cu
            best_gain = links.get(cu, 0.0) / m - tot[cu] * k[u] / (2 * m * m)
            # candidates in order of their lowest-ranked member for stable ties
            for c in sorted(links):
                if c == cu:
                    continue
                gain = links[c] / m - tot[c] * k[u] / (2 * m * m)
                if gain > best_gain + 1e-12:
                    best, best_gain = c, gain
            tot[best] += k[u]
            if best != cu:
                community[u] = best
                moved = True
                improved = True
    return community, improved


def _aggregate(adj: WeightedAdj, community: Dict[Hashable, int]) -> WeightedAdj:
    out: WeightedAdj = {}
    for u in adj:
        out.setdefault(community[u], {})
    for u, nbrs in adj.items():
        cu = community[u]
        for v, w in nbrs.items():
            cv = community[v]
            if u == v:
                out[cu][cu] = out[cu].get(cu, 0.0) + w
            elif cu == cv:
                # internal edge seen from both ends becomes half a loop each time
                out[cu][cu] = out[cu].get(cu, 0.0) + w / 2.0
            else:
                out[cu][cv] = out[cu].get(cv, 0.0) + w
    return out


def louvain(g: WeightedDigraph, seed: Optional[int] = 0) -> Tuple[Dict[Hashable, int], float]:
    """Partition (node -> community id) and its modularity.

    Nodes are visited in graph order, shuffled by ``seed`` when it is not
    None. Community ids are renumbered by first appearance in graph order.
    """
    adj = undirected_weighted(g)
    if not adj:
        return {}, 0.0
    m = _total_weight(adj)
    if m == 0:
        return {u: i for i, u in enumerate(g.nodes)}, 0.0
    rng = random.Random(seed)
    membership = {u: u for u in adj}
    level = adj
    while True:
        order = list(level)
        if seed is not None:
            rng.shuffle(order)
        community, improved = _one_level(level, order, m)
        if not improved:
            break
        membership = {u: community[membership[u]] for u in membership}
        level = _aggregate(level, community)
    ids: Dict[Hashable, int] = {}
    partition = {}
    for u in g.nodes:
        c = membership[u]
        if c not in ids:
            ids[c] = len(ids)
        partition[u] = ids[c]
    return partition, modularity(adj, partition)


def louvain_modularity(g: WeightedDigraph, seed: Optional[int] = 0) -> Tuple[Dict[Hashable, int], float]:
    return louvain(g, seed)
