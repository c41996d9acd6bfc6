"""Disparity-filter backbone of weighted directed networks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from dappnet.graph import Edge, Node, WeightedDigraph

EITHER = "either-direction"
OUT_ONLY = "out-only"
MODES = (EITHER, OUT_ONLY)


def edge_alpha(weight: float, strength: float, degree: int) -> Optional[float]:
    """Significance level (1 - w/s)^(k-1) of one edge at one endpoint.

    Returns ``None`` for degree 1, where the null model is degenerate.
    """
    if weight <= 0 or strength <= 0:
        raise ValueError("weight and strength must be positive")
    if degree < 1:
        raise ValueError("degree must be at least 1")
    p = weight / strength
    if p > 1.0 + 1e-12:
        raise ValueError(f"weight {weight} exceeds node strength {strength}")
    if degree == 1:
        return None
    return max(0.0, 1.0 - p) ** (degree - 1)


@dataclass
class EdgeSignificance:
    edge: Edge
    p_out: float
    p_in: float
    alpha_out: Optional[float]
    alpha_in: Optional[float]


@dataclass
class BackboneResult:
    filtered: WeightedDigraph
    retention_nodes: float
    retention_edges: float
    alpha_threshold: float
    mode: str = EITHER


def edge_significance(g: WeightedDigraph) -> Dict[Edge, EdgeSignificance]:
    """Per-edge alphas; a self-loop counts once as out-edge and once as in-edge."""
    out_s: Dict[Node, float] = {n: 0.0 for n in g.nodes}
    out_k: Dict[Node, int] = {n: 0 for n in g.nodes}
    in_s: Dict[Node, float] = {n: 0.0 for n in g.nodes}
    in_k: Dict[Node, int] = {n: 0 for n in g.nodes}
    for (u, v), w in g.edges.items():
        out_s[u] += w
        out_k[u] += 1
        in_s[v] += w
        in_k[v] += 1
    sig = {}
    for (u, v), w in g.edges.items():
        sig[(u, v)] = EdgeSignificance(
            edge=(u, v),
            p_out=w / out_s[u],
            p_in=w / in_s[v],
            alpha_out=edge_alpha(w, out_s[u], out_k[u]),
            alpha_in=edge_alpha(w, in_s[v], in_k[v]),
        )
    return sig


def _passes(alpha: Optional[float], threshold: float) -> bool:
    # a degree-1 endpoint keeps its only edge
    return alpha is None or alpha < threshold


def filter_graph(g: WeightedDigraph, alpha_threshold: float = 0.05, mode: str = EITHER) -> BackboneResult:
    if not 0.0 < alpha_threshold < 1.0:
        raise ValueError(f"alpha threshold must lie in (0, 1), got {alpha_threshold}")
    if mode not in MODES:
        raise ValueError(f"unknown filter mode {mode!r}; expected one of {MODES}")
    if g.n_nodes == 0:
        return BackboneResult(WeightedDigraph(), 0.0, 0.0, alpha_threshold, mode)
    kept: Dict[Tuple[Node, Node], float] = {}
    for e, s in edge_significance(g).items():
        ok = _passes(s.alpha_out, alpha_threshold)
        if mode == EITHER:
            ok = ok or _passes(s.alpha_in, alpha_threshold)
        if ok:
            kept[e] = g.edges[e]
    touched = {u for e in kept for u in e}
    filtered = WeightedDigraph([n for n in g.nodes if n in touched], kept)
    return BackboneResult(
        filtered=filtered,
        retention_nodes=filtered.n_nodes / g.n_nodes,
        retention_edges=(filtered.n_edges / g.n_edges) if g.n_edges else 0.0,
        alpha_threshold=alpha_threshold,
        mode=mode,
    )
