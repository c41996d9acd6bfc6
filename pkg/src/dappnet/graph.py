"""Weighted directed graph shared by every stage of the pipeline."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterable, Iterator, List, Set, Tuple

Node = Hashable
Edge = Tuple[Node, Node]


@dataclass
class WeightedDigraph:
    """Directed graph with positive edge weights and optional self-loops.

    Node insertion order is preserved and is the iteration order used by
    every algorithm downstream, which is what keeps results reproducible.
    Edges with weight <= 0 are never stored.
    """

    nodes: List[Node] = field(default_factory=list)
    edges: Dict[Edge, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self._node_set: Set[Node] = set()
        given = list(self.nodes)
        self.nodes = []
        for n in given:
            self.add_node(n)
        for (u, v), w in list(self.edges.items()):
            if w <= 0:
                del self.edges[(u, v)]
                continue
            self.add_node(u)
            self.add_node(v)

    def add_node(self, n: Node) -> None:
        if n not in self._node_set:
            self._node_set.add(n)
            self.nodes.append(n)

    def add_edge(self, u: Node, v: Node, weight: float = 1.0) -> None:
        """Add ``weight`` to the edge u->v, creating it if needed."""
        if weight <= 0:
            raise ValueError(f"edge weight must be positive, got {weight}")
        self.add_node(u)
        self.add_node(v)
        self.edges[(u, v)] = self.edges.get((u, v), 0.0) + weight

    def __contains__(self, n: object) -> bool:
        return n in self._node_set

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def total_weight(self) -> float:
        return sum(self.edges.values())

    def out_edges(self) -> Dict[Node, Dict[Node, float]]:
        out: Dict[Node, Dict[Node, float]] = {n: {} for n in self.nodes}
        for (u, v), w in self.edges.items():
            out[u][v] = w
        return out

    def in_edges(self) -> Dict[Node, Dict[Node, float]]:
        inc: Dict[Node, Dict[Node, float]] = {n: {} for n in self.nodes}
        for (u, v), w in self.edges.items():
            inc[v][u] = w
        return inc

    def self_loops(self) -> Iterator[Node]:
        return (u for (u, v) in self.edges if u == v)

    def subgraph(self, keep: Iterable[Node]) -> "WeightedDigraph":
        keep_set = set(keep)
        nodes = [n for n in self.nodes if n in keep_set]
        edges = {
            (u, v): w
            for (u, v), w in self.edges.items()
            if u in keep_set and v in keep_set
        }
        return WeightedDigraph(nodes, edges)

    def copy(self) -> "WeightedDigraph":
        return WeightedDigraph(list(self.nodes), dict(self.edges))

    def undirected(self, *, keep_self_loops: bool = False) -> Dict[Node, Dict[Node, None]]:
        """Simple undirected adjacency (unweighted).

        Neighbour collections are insertion-ordered dicts used as sets, so
        iteration order never depends on hash seeds.
        """
        adj: Dict[Node, Dict[Node, None]] = {n: {} for n in self.nodes}
        for u, v in self.edges:
            if u == v and not keep_self_loops:
                continue
            adj[u][v] = None
            adj[v][u] = None
        return adj

    def undirected_weights(self) -> Dict[Tuple[Node, Node], float]:
        """Weighted undirected view: both directions summed, loops kept.

        Keys are ordered by node insertion index so (a, b) and (b, a)
        collapse to one entry.
        """
        index = {n: i for i, n in enumerate(self.nodes)}
        out: Dict[Tuple[Node, Node], float] = {}
        for (u, v), w in self.edges.items():
            key = (u, v) if index[u] <= index[v] else (v, u)
            out[key] = out.get(key, 0.0) + w
        return out

    @classmethod
    def from_undirected(
        cls, nodes: Iterable[Node], pairs: Iterable[Tuple[Node, Node]]
    ) -> "WeightedDigraph":
        """One weight-1 directed edge per undirected pair."""
        g = cls(list(nodes))
        for u, v in pairs:
            g.add_edge(u, v, 1.0)
        return g


def adjacency_from_pairs(
    nodes: Iterable[Node], pairs: Iterable[Tuple[Node, Node]]
) -> Dict[Node, Dict[Node, None]]:
    adj: Dict[Node, Dict[Node, None]] = {n: {} for n in nodes}
    for u, v in pairs:
        if u == v:
            continue
        adj.setdefault(u, {})[v] = None
        adj.setdefault(v, {})[u] = None
    return adj
