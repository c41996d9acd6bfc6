"""Maximal clique enumeration (Bron-Kerbosch with Tomita pivoting)."""

from __future__ import annotations

from collections import Counter
from typing import Dict, Hashable, Iterator, List, Optional

from dappnet.metrics.paths import GraphLike, as_adjacency

DEFAULT_BUDGET = 10**6


class CliqueBudgetExceeded(RuntimeError):
    pass


def iter_maximal_cliques(g: GraphLike, budget: Optional[int] = DEFAULT_BUDGET) -> Iterator[List[Hashable]]:
    adj = as_adjacency(g)
    order = {u: i for i, u in enumerate(adj)}
    nbr = {u: set(vs) for u, vs in adj.items()}
    found = 0
    # explicit stack of (R, P, X, remaining candidates)
    stack = []

    def frame(r, p, x):
        if not p:
            return (r, p, x, [])
        pivot = max(p | x, key=lambda u: (len(p & nbr[u]), -order[u]))
        cand = sorted(p - nbr[pivot], key=order.__getitem__)
        return (r, p, x, cand)

    if not adj:
        return
    stack.append(frame([], set(adj), set()))
    while stack:
        r, p, x, cand = stack[-1]
        if not p and not x:
            stack.pop()
            found += 1
            if budget is not None and found > budget:
                raise CliqueBudgetExceeded(f"more than {budget} maximal cliques")
            yield sorted(r, key=order.__getitem__)
            continue
        if not cand:
            stack.pop()
            continue
        v = cand.pop(0)
        stack.append(frame(r + [v], p & nbr[v], x & nbr[v]))
        p.discard(v)
        x.add(v)


def maximal_cliques(g: GraphLike, budget: Optional[int] = DEFAULT_BUDGET) -> List[List[Hashable]]:
    return list(iter_maximal_cliques(g, budget))


def clique_size_histogram(
    g: GraphLike, min_size: int = 3, budget: Optional[int] = DEFAULT_BUDGET
) -> Dict[int, int]:
    sizes = Counter(len(c) for c in iter_maximal_cliques(g, budget) if len(c) >= min_size)
    return dict(sorted(sizes.items()))


def normalized_histogram(hist: Dict[int, int], n_contracts: int) -> Dict[int, float]:
    if n_contracts < 1:
        raise ValueError("contract count must be positive")
    return {size: count / n_contracts for size, count in hist.items()}
