"""Connectivity, path-length, betweenness and clustering on the simple
undirected view of a network (self-loops and weights ignored)."""

from __future__ import annotations

from collections import deque
from typing import Collection, Dict, Hashable, List, Mapping, Sequence, Set, Tuple, Union

from dappnet.graph import WeightedDigraph

# neighbour collections are ordered dicts (or sets) keyed by node
Adjacency = Mapping[Hashable, Collection[Hashable]]
GraphLike = Union[WeightedDigraph, Adjacency]


def as_adjacency(g: GraphLike) -> Dict[Hashable, Dict[Hashable, None]]:
    if isinstance(g, WeightedDigraph):
        return g.undirected()
    return {u: {v: None for v in nbrs if v != u} for u, nbrs in g.items()}


def components(g: GraphLike) -> List[List[Hashable]]:
    """Weakly connected components, largest first.

    Nodes keep graph order inside a component; equal-sized components keep
    the order of their first node.
    """
    adj = as_adjacency(g)
    seen: Set[Hashable] = set()
    comps: List[List[Hashable]] = []
    order = {u: i for i, u in enumerate(adj)}
    for start in adj:
        if start in seen:
            continue
        seen.add(start)
        members = [start]
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    members.append(v)
                    queue.append(v)
        members.sort(key=order.__getitem__)
        comps.append(members)
    comps.sort(key=lambda c: (-len(c), order[c[0]]))
    return comps


def bfs_distances(adj: Adjacency, source: Hashable) -> Dict[Hashable, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def _all_distances(g: GraphLike) -> Tuple[int, int, int]:
    """(n, max distance, sum of distances over ordered pairs)."""
    adj = as_adjacency(g)
    n = len(adj)
    longest = 0
    total = 0
    for u in adj:
        dist = bfs_distances(adj, u)
        if len(dist) != n:
            raise ValueError("path metrics need a connected component")
        longest = max(longest, max(dist.values()))
        total += sum(dist.values())
    return n, longest, total


def diameter(component: GraphLike) -> int:
    n, longest, _ = _all_distances(component)
    return longest


def avg_path_length(component: GraphLike) -> float:
    """Mean hop distance over ordered pairs of distinct nodes (0.0 for n < 2)."""
    n, _, total = _all_distances(component)
    if n < 2:
        return 0.0
    return total / (n * (n - 1))


def betweenness(g: GraphLike, normalized: bool = True) -> Dict[Hashable, float]:
    """Brandes accumulation over unweighted shortest paths.

    Normalised by (n-1)(n-2)/2, the number of pairs that exclude the node.
    """
    adj = as_adjacency(g)
    nodes = list(adj)
    n = len(nodes)
    bc = {u: 0.0 for u in nodes}
    if n < 3:
        return bc
    for s in nodes:
        stack: List[Hashable] = []
        preds: Dict[Hashable, List[Hashable]] = {u: [] for u in nodes}
        sigma = dict.fromkeys(nodes, 0)
        sigma[s] = 1
        dist = {s: 0}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            stack.append(u)
            for v in adj[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    queue.append(v)
                if dist[v] == dist[u] + 1:
                    sigma[v] += sigma[u]
                    preds[v].append(u)
        delta = dict.fromkeys(nodes, 0.0)
        while stack:
            w = stack.pop()
            for u in preds[w]:
                delta[u] += sigma[u] / sigma[w] * (1.0 + delta[w])
            if w != s:
                bc[w] += delta[w]
    # each unordered pair was counted from both endpoints
    scale = 0.5
    if normalized:
        scale /= (n - 1) * (n - 2) / 2
    return {u: b * scale for u, b in bc.items()}


def _triangles_and_triples(adj: Adjacency) -> Tuple[Dict[Hashable, int], Dict[Hashable, int]]:
    tri = {}
    triples = {}
    for u, nbrs in adj.items():
        nb = list(nbrs)
        k = len(nb)
        links = 0
        for i in range(k):
            ni = adj[nb[i]]
            for j in range(i + 1, k):
                if nb[j] in ni:
                    links += 1
        tri[u] = links
        triples[u] = k * (k - 1) // 2
    return tri, triples


def clustering(g: GraphLike) -> Tuple[Dict[Hashable, float], float]:
    """Local clustering per node and global transitivity."""
    adj = as_adjacency(g)
    tri, triples = _triangles_and_triples(adj)
    local = {u: (tri[u] / triples[u] if triples[u] else 0.0) for u in adj}
    total_triples = sum(triples.values())
    glob = sum(tri.values()) / total_triples if total_triples else 0.0
    return local, glob


def transitivity_by_census(g: GraphLike) -> float:
    """3 x triangles / connected triples, from an explicit triangle census."""
    adj = as_adjacency(g)
    order = {u: i for i, u in enumerate(adj)}
    triangles = 0
    for u in adj:
        for v in adj[u]:
            if order[v] <= order[u]:
                continue
            for w in adj[v]:
                if order[w] > order[v] and w in adj[u]:
                    triangles += 1
    triples = sum(len(nb) * (len(nb) - 1) // 2 for nb in adj.values())
    return 3 * triangles / triples if triples else 0.0


def largest_component(g: WeightedDigraph) -> WeightedDigraph:
    comps = components(g)
    if not comps:
        return WeightedDigraph()
    return g.subgraph(comps[0])


def is_connected(adj: Adjacency) -> bool:
    if not adj:
        return True
    start = next(iter(adj))
    return len(bfs_distances(adj, start)) == len(adj)


def induced(adj: Adjacency, keep: Sequence[Hashable]) -> Dict[Hashable, Dict[Hashable, None]]:
    keep_set = set(keep)
    return {u: {v: None for v in adj[u] if v in keep_set} for u in keep if u in adj}
