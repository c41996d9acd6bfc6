"""Reference ensembles: block-preserving rewiring and G(n, m) graphs."""

from __future__ import annotations

import logging
import math
import random
from dataclasses import asdict, dataclass, field
from itertools import combinations
from typing import Dict, Hashable, List, Mapping, Optional, Sequence, Tuple

from scipy.stats import spearmanr

from dappnet.graph import WeightedDigraph
from dappnet.metrics.louvain import louvain
from dappnet.metrics.paths import as_adjacency, avg_path_length, betweenness, clustering, components, induced
from dappnet.seeding import derive_seed

log = logging.getLogger(__name__)

WEAK_COMPONENTS = "weak-components"
LOUVAIN = "louvain"
SMALL_WORLD_MIN_NODES = 50


class RewireError(RuntimeError):
    pass


@dataclass
class RandomizationConfig:
    seed: int = 0
    n_realizations: int = 100
    preserve_degree: bool = False
    partition_source: str = WEAK_COMPONENTS
    # edge swaps attempted per within-block edge in the degree-preserving variant
    swaps_per_edge: int = 10
    retry_budget: int = 100

    def __post_init__(self) -> None:
        if self.n_realizations < 1:
            raise ValueError("n_realizations must be at least 1")
        if self.partition_source not in (WEAK_COMPONENTS, LOUVAIN):
            raise ValueError(f"unknown partition source {self.partition_source!r}")


def partition_blocks(g: WeightedDigraph, source: str = WEAK_COMPONENTS, seed: int = 0) -> Dict[Hashable, int]:
    if source == WEAK_COMPONENTS:
        return {n: i for i, comp in enumerate(components(g)) for n in comp}
    if source == LOUVAIN:
        return louvain(g, seed)[0]
    raise ValueError(f"unknown partition source {source!r}")


def _pairs(g: WeightedDigraph) -> List[Tuple[Hashable, Hashable]]:
    """Undirected simple edges, each once, oriented by node order."""
    index = {n: i for i, n in enumerate(g.nodes)}
    seen = {}
    for u, v in g.edges:
        if u == v:
            continue
        key = (u, v) if index[u] < index[v] else (v, u)
        seen[key] = None
    return list(seen)


def _uniform_block(nodes: Sequence[Hashable], m: int, rng: random.Random, budget: int):
    n = len(nodes)
    total = n * (n - 1) // 2
    if m > total:
        raise RewireError(f"block of {n} nodes cannot hold {m} edges")
    if total <= 50_000:
        all_pairs = list(combinations(nodes, 2))
        return rng.sample(all_pairs, m)
    chosen: Dict[Tuple[int, int], None] = {}
    attempts = 0
    limit = budget * max(m, 1)
    while len(chosen) < m:
        attempts += 1
        if attempts > limit:
            raise RewireError(f"could not place {m} edges among {n} nodes")
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j:
            continue
        chosen[(min(i, j), max(i, j))] = None
    return [(nodes[i], nodes[j]) for i, j in chosen]


def _degree_preserving_block(edges: List[Tuple[Hashable, Hashable]], rng: random.Random, swaps: int):
    """Double-edge swaps that keep every degree and create no loops or duplicates."""
    edges = list(edges)
    present = {frozenset(e) for e in edges}
    if len(edges) < 2:
        return edges
    for _ in range(swaps):
        i, j = rng.sample(range(len(edges)), 2)
        (a, b), (c, d) = edges[i], edges[j]
        if rng.random() < 0.5:
            c, d = d, c
        if len({a, b, c, d}) < 4:
            continue
        e1, e2 = frozenset((a, d)), frozenset((c, b))
        if e1 in present or e2 in present:
            continue
        present -= {frozenset((a, b)), frozenset((c, d))}
        present |= {e1, e2}
        edges[i], edges[j] = (a, d), (c, b)
    return edges


def block_preserving_rewire(
    g: WeightedDigraph,
    partition: Mapping[Hashable, int],
    cfg: RandomizationConfig,
    seed: Optional[int] = None,
) -> WeightedDigraph:
    """Shuffle links inside each block; edges between blocks stay put.

    The result is a simple undirected graph stored one direction per pair
    (weight 1). Self-loops of the input are carried over unchanged.
    """
    missing = [n for n in g.nodes if n not in partition]
    if missing:
        raise ValueError(f"partition does not cover nodes {missing[:5]}")
    rng = random.Random(cfg.seed if seed is None else seed)
    blocks: Dict[int, List[Hashable]] = {}
    for n in g.nodes:
        blocks.setdefault(partition[n], []).append(n)
    inside: Dict[int, List[Tuple[Hashable, Hashable]]] = {b: [] for b in blocks}
    bridges = []
    for u, v in _pairs(g):
        if partition[u] == partition[v]:
            inside[partition[u]].append((u, v))
        else:
            bridges.append((u, v))
    out = WeightedDigraph(list(g.nodes))
    index = {n: i for i, n in enumerate(g.nodes)}
    for b in sorted(blocks):
        m_b = len(inside[b])
        if m_b == 0:
            continue
        if cfg.preserve_degree:
            new = _degree_preserving_block(inside[b], rng, cfg.swaps_per_edge * m_b)
        else:
            new = _uniform_block(blocks[b], m_b, rng, cfg.retry_budget)
        for u, v in new:
            if index[u] > index[v]:
                u, v = v, u
            out.add_edge(u, v, 1.0)
    for u, v in bridges:
        out.add_edge(u, v, 1.0)
    for u in g.self_loops():
        out.add_edge(u, u, g.edges[(u, u)])
    return out


def uniform_random_graph(n: int, m: int, seed: int, labels: Optional[Sequence[Hashable]] = None) -> WeightedDigraph:
    """Uniform simple undirected graph with exactly n nodes and m edges."""
    total = n * (n - 1) // 2
    if n < 0 or m < 0 or m > total:
        raise ValueError(f"cannot place {m} edges on {n} nodes")
    nodes = list(labels) if labels is not None else list(range(n))
    if len(nodes) != n:
        raise ValueError("labels must have length n")
    rng = random.Random(seed)
    g = WeightedDigraph(nodes)
    for idx in sorted(rng.sample(range(total), m)):
        i, j = _unrank_pair(idx, n)
        g.add_edge(nodes[i], nodes[j], 1.0)
    return g


def _unrank_pair(idx: int, n: int) -> Tuple[int, int]:
    """Map 0..C(n,2)-1 onto pairs (i, j), i < j, in lexicographic order."""
    # row i starts at i*n - i*(i+1)/2
    i = int(n - 2 - math.floor(math.sqrt(-8 * idx + 4 * n * (n - 1) - 7) / 2.0 - 0.5))
    i = min(max(i, 0), n - 2)

    def row_start(r: int) -> int:
        return r * n - r * (r + 1) // 2

    # guard against float rounding in the closed form
    while i > 0 and row_start(i) > idx:
        i -= 1
    while i < n - 2 and row_start(i + 1) <= idx:
        i += 1
    start = row_start(i)
    j = idx - start + i + 1
    return i, j


@dataclass
class SmallWorldComparison:
    real_avg_path: float
    random_avg_path_mean: float
    real_clustering: float
    random_clustering_mean: float
    n_nodes: int
    n_edges: int
    n_realizations: int
    skipped: bool = False
    note: str = ""

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.real_avg_path, self.random_avg_path_mean, self.real_clustering, self.random_clustering_mean)

    def to_dict(self) -> dict:
        return asdict(self)


def small_world_comparison(
    g: WeightedDigraph, cfg: RandomizationConfig, min_nodes: int = SMALL_WORLD_MIN_NODES
) -> SmallWorldComparison:
    """Largest component versus G(n, m) graphs with the same n and m."""
    adj = as_adjacency(g)
    comps = components(adj)
    if not comps or len(comps[0]) < min_nodes:
        size = len(comps[0]) if comps else 0
        log.info("small-world comparison skipped: largest component has %d nodes", size)
        return SmallWorldComparison(
            math.nan, math.nan, math.nan, math.nan, size, 0, 0, True,
            f"largest component has {size} nodes (< {min_nodes})",
        )
    lcc = induced(adj, comps[0])
    n = len(lcc)
    m = sum(len(v) for v in lcc.values()) // 2
    real_path = avg_path_length(lcc)
    real_c = clustering(lcc)[1]
    paths, clus = [], []
    for r in range(cfg.n_realizations):
        rg = uniform_random_graph(n, m, derive_seed(cfg.seed, "gnm", r))
        radj = as_adjacency(rg)
        rl = induced(radj, components(radj)[0])
        paths.append(avg_path_length(rl))
        clus.append(clustering(radj)[1])
    return SmallWorldComparison(
        real_path, sum(paths) / len(paths), real_c, sum(clus) / len(clus), n, m, cfg.n_realizations
    )


@dataclass
class BlockNullSummary:
    n_realizations: int
    original_global_clustering: float
    null_global_clustering_mean: float
    original_mean_betweenness: float
    null_mean_betweenness: float
    spearman_original: Optional[float]
    spearman_null: Optional[float]
    partition_source: str = WEAK_COMPONENTS
    preserve_degree: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def _spearman(xs: Sequence[float], ys: Sequence[float]) -> Optional[float]:
    if len(xs) < 3 or len(set(xs)) < 2 or len(set(ys)) < 2:
        return None
    rho = spearmanr(xs, ys).statistic
    return None if math.isnan(rho) else float(rho)


def betweenness_clustering_pairs(g: WeightedDigraph) -> Tuple[List[float], List[float]]:
    """(betweenness, local clustering) for nodes of the largest component."""
    adj = as_adjacency(g)
    comps = components(adj)
    if not comps:
        return [], []
    lcc = induced(adj, comps[0])
    bc = betweenness(lcc)
    local = clustering(lcc)[0]
    return [bc[n] for n in lcc], [local[n] for n in lcc]


def block_null_summary(g: WeightedDigraph, cfg: RandomizationConfig) -> BlockNullSummary:
    partition = partition_blocks(g, cfg.partition_source, cfg.seed)
    bc0, cl0 = betweenness_clustering_pairs(g)
    glob0 = clustering(g)[1]
    globs, bcs = [], []
    null_bc: List[float] = []
    null_cl: List[float] = []
    for r in range(cfg.n_realizations):
        ng = block_preserving_rewire(g, partition, cfg, derive_seed(cfg.seed, "block", r))
        globs.append(clustering(ng)[1])
        b, c = betweenness_clustering_pairs(ng)
        bcs.append(sum(b) / len(b) if b else 0.0)
        if r == 0:
            null_bc, null_cl = b, c
    return BlockNullSummary(
        n_realizations=cfg.n_realizations,
        original_global_clustering=glob0,
        null_global_clustering_mean=sum(globs) / len(globs),
        original_mean_betweenness=sum(bc0) / len(bc0) if bc0 else 0.0,
        null_mean_betweenness=sum(bcs) / len(bcs),
        spearman_original=_spearman(bc0, cl0),
        spearman_null=_spearman(null_bc, null_cl),
        partition_source=cfg.partition_source,
        preserve_degree=cfg.preserve_degree,
    )


def ring_lattice_rewired(n: int, k: int, p: float, seed: int) -> WeightedDigraph:
    """Watts-Strogatz-style graph: ring of n nodes, k nearest neighbours,
    each lattice edge's far end moved with probability p."""
    rng = random.Random(seed)
    adj: Dict[int, set] = {i: set() for i in range(n)}
    for i in range(n):
        for j in range(1, k // 2 + 1):
            adj[i].add((i + j) % n)
            adj[(i + j) % n].add(i)
    for j in range(1, k // 2 + 1):
        for i in range(n):
            v = (i + j) % n
            if rng.random() < p and v in adj[i]:
                choices = [w for w in range(n) if w != i and w not in adj[i]]
                if not choices:
                    continue
                w = rng.choice(choices)
                adj[i].discard(v)
                adj[v].discard(i)
                adj[i].add(w)
                adj[w].add(i)
    pairs = sorted({(min(u, v), max(u, v)) for u in adj for v in adj[u]})
    return WeightedDigraph.from_undirected(range(n), pairs)
