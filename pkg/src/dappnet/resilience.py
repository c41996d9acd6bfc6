"""Node-removal experiments on a network's largest component."""

from __future__ import annotations

import math
import random
from dataclasses import asdict, dataclass, field
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from dappnet.graph import WeightedDigraph
from dappnet.metrics.paths import as_adjacency, betweenness, is_connected
from dappnet.seeding import derive_seed

BETWEENNESS = "betweenness-static"
DEGREE = "degree-static"
RANDOM = "random"
STRATEGIES = (BETWEENNESS, DEGREE, RANDOM)

MIN_COMPONENT_NODES = 50
MAX_FRACTION = 0.2
DEFAULT_GRID = tuple(round(0.01 * i, 2) for i in range(21))


@dataclass(frozen=True)
class DisconnectionRule:
    """The survivor counts as split when the largest piece holds less than
    ``min_giant_share`` of surviving nodes, or the second-largest piece has
    at least ``min_second_size`` nodes."""

    min_giant_share: float = 0.9
    min_second_size: int = 2

    def __call__(self, sizes: Sequence[int]) -> bool:
        total = sum(sizes)
        if total == 0:
            return True
        ordered = sorted(sizes, reverse=True)
        if ordered[0] / total < self.min_giant_share:
            return True
        return len(ordered) > 1 and ordered[1] >= self.min_second_size


@dataclass
class RemovalTrace:
    strategy: str
    fractions: List[float]
    avg_path_lengths: List[float]
    disconnected_at: Optional[float] = None
    trials: int = 1
    seed: Optional[int] = None
    n_nodes: int = 0
    removal_counts: List[int] = field(default_factory=list)
    stderr: List[float] = field(default_factory=list)
    giant_shares: List[float] = field(default_factory=list)
    # fraction of trials in which the survivor was split (0/1 for targeted)
    disconnected_share: List[float] = field(default_factory=list)
    removal_order: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class CriticalThreshold:
    dapp: str
    threshold_fraction: Optional[float]
    removed_nodes: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


DENSE_LIMIT = 600


def _dense_avg_path(adj: np.ndarray) -> float:
    """Mean hop distance of a connected graph by frontier expansion."""
    n = adj.shape[0]
    reached = np.eye(n, dtype=bool)
    frontier = reached.copy()
    total = 0
    d = 0
    while frontier.any():
        d += 1
        nxt = ((frontier.astype(np.float32) @ adj) > 0) & ~reached
        total += d * int(nxt.sum())
        reached |= nxt
        frontier = nxt
    return total / (n * (n - 1))


class _Component:
    """Integer-indexed copy of an undirected simple graph for fast queries."""

    def __init__(self, adj: Dict[Hashable, Dict[Hashable, None]]) -> None:
        self.labels = list(adj)
        index = {u: i for i, u in enumerate(self.labels)}
        rows, cols = [], []
        for u, nbrs in adj.items():
            for v in nbrs:
                rows.append(index[u])
                cols.append(index[v])
        n = len(self.labels)
        self.matrix = csr_matrix((np.ones(len(rows), dtype=np.float32), (rows, cols)), shape=(n, n))
        self.dense = self.matrix.toarray() if n <= DENSE_LIMIT else None

    def survivor_stats(self, removed: Sequence[int]) -> Tuple[List[int], float]:
        """Piece sizes of the survivor and the avg path of its largest piece."""
        n = len(self.labels)
        keep = np.ones(n, dtype=bool)
        keep[np.asarray(removed, dtype=np.intp)] = False
        idx = np.flatnonzero(keep)
        if idx.size == 0:
            return [], 0.0
        if self.dense is not None:
            sub_dense = self.dense[np.ix_(idx, idx)]
            sub = csr_matrix(sub_dense)
        else:
            sub_dense = None
            sub = self.matrix[idx][:, idx]
        _, labels = connected_components(sub, directed=False)
        sizes = np.bincount(labels)
        giant_label = int(np.argmax(sizes))
        giant = np.flatnonzero(labels == giant_label)
        ordered = sorted(sizes.tolist(), reverse=True)
        if giant.size < 2:
            return ordered, 0.0
        if sub_dense is not None:
            return ordered, _dense_avg_path(sub_dense[np.ix_(giant, giant)])
        dist = shortest_path(sub[giant][:, giant], method="D", unweighted=True, directed=False)
        k = giant.size
        return ordered, float(dist.sum()) / (k * (k - 1))


def _check_grid(grid: Sequence[float]) -> List[float]:
    grid = [float(f) for f in grid]
    if not grid:
        raise ValueError("removal grid is empty")
    if any(f < 0 or f > MAX_FRACTION + 1e-12 for f in grid):
        raise ValueError(f"removal fractions must lie in [0, {MAX_FRACTION}]")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("removal grid must be strictly increasing")
    return grid


def removal_count(fraction: float, n: int) -> int:
    # the epsilon keeps e.g. 0.29 * 100 from flooring to 28
    return int(math.floor(fraction * n + 1e-9))


def static_ranking(adj: Dict[Hashable, Dict[Hashable, None]], strategy: str) -> List[Hashable]:
    """Nodes ordered by the strategy's centrality, computed once; ties by label."""
    if strategy == BETWEENNESS:
        score = betweenness(adj)
    elif strategy == DEGREE:
        score = {u: float(len(nb)) for u, nb in adj.items()}
    else:
        raise ValueError(f"{strategy!r} has no static ranking")
    return sorted(adj, key=lambda u: (-score[u], str(u)))


def removal_experiment(
    component: WeightedDigraph,
    strategy: str,
    grid: Sequence[float] = DEFAULT_GRID,
    trials: int = 100,
    seed: int = 0,
    *,
    rule: DisconnectionRule = DisconnectionRule(),
    min_nodes: int = MIN_COMPONENT_NODES,
) -> RemovalTrace:
    """Average path length of the largest surviving piece along the grid.

    Targeted strategies rank nodes once and remove the top floor(f*n) at
    each fraction f. The random strategy draws one permutation per trial
    and removes its prefixes, averaging over trials.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    grid = _check_grid(grid)
    adj = as_adjacency(component)
    n = len(adj)
    if n < min_nodes:
        raise ValueError(f"component has {n} nodes; at least {min_nodes} required")
    if not is_connected(adj):
        raise ValueError("removal experiments need a connected component")
    comp = _Component(adj)
    counts = [removal_count(f, n) for f in grid]
    trace = RemovalTrace(strategy, grid, [], n_nodes=n, removal_counts=counts, seed=seed)

    if strategy != RANDOM:
        ranking = static_ranking(adj, strategy)
        index = {u: i for i, u in enumerate(comp.labels)}
        order = [index[u] for u in ranking]
        trace.trials = 1
        trace.removal_order = [str(u) for u in ranking[: max(counts)]]
        for f, k in zip(grid, counts):
            sizes, avg = comp.survivor_stats(order[:k])
            split = rule(sizes)
            trace.avg_path_lengths.append(avg)
            trace.stderr.append(0.0)
            trace.giant_shares.append(sizes[0] / sum(sizes) if sizes else 0.0)
            trace.disconnected_share.append(1.0 if split else 0.0)
            if split and trace.disconnected_at is None:
                trace.disconnected_at = f
        return trace

    if trials < 1:
        raise ValueError("random removal needs at least one trial")
    trace.trials = trials
    paths = np.zeros((trials, len(grid)))
    shares = np.zeros((trials, len(grid)))
    splits = np.zeros((trials, len(grid)))
    for t in range(trials):
        rng = random.Random(derive_seed(seed, "random-removal", t))
        perm = list(range(n))
        rng.shuffle(perm)
        for j, k in enumerate(counts):
            sizes, avg = comp.survivor_stats(perm[:k])
            paths[t, j] = avg
            shares[t, j] = sizes[0] / sum(sizes) if sizes else 0.0
            splits[t, j] = rule(sizes)
    trace.avg_path_lengths = paths.mean(axis=0).tolist()
    trace.stderr = (paths.std(axis=0, ddof=1) / math.sqrt(trials)).tolist() if trials > 1 else [0.0] * len(grid)
    trace.giant_shares = shares.mean(axis=0).tolist()
    trace.disconnected_share = splits.mean(axis=0).tolist()
    # the random trace is marked where most trials have split
    for f, s in zip(grid, trace.disconnected_share):
        if s >= 0.5:
            trace.disconnected_at = f
            break
    return trace


def critical_threshold(traces: Sequence[RemovalTrace], dapp: str = "") -> CriticalThreshold:
    """Disconnection point of the betweenness-static trace."""
    targeted = [t for t in traces if t.strategy in (BETWEENNESS, DEGREE)]
    if not targeted:
        raise ValueError("critical threshold needs at least one targeted trace")
    chosen = next((t for t in targeted if t.strategy == BETWEENNESS), targeted[0])
    if chosen.disconnected_at is None:
        return CriticalThreshold(dapp, None, [])
    k = chosen.removal_counts[chosen.fractions.index(chosen.disconnected_at)]
    return CriticalThreshold(dapp, chosen.disconnected_at, chosen.removal_order[:k])


def trace_rows(trace: RemovalTrace) -> List[Tuple]:
    rows = []
    for j, f in enumerate(trace.fractions):
        rows.append(
            (
                f,
                trace.avg_path_lengths[j],
                trace.strategy,
                trace.avg_path_lengths[j] if trace.strategy == RANDOM else "",
                trace.stderr[j] if trace.stderr else 0.0,
                trace.giant_shares[j] if trace.giant_shares else "",
                int(trace.disconnected_at is not None and f >= trace.disconnected_at),
            )
        )
    return rows


TRACE_CSV_HEADER = ("fraction", "value", "strategy", "trial_mean", "stderr", "giant_share", "disconnected")
