"""Per-network metrics battery and its JSON form."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Hashable, List, Optional, Tuple

from dappnet.graph import WeightedDigraph
from dappnet.metrics.cliques import DEFAULT_BUDGET, clique_size_histogram, normalized_histogram
from dappnet.metrics.louvain import louvain
from dappnet.metrics.paths import (
    as_adjacency,
    avg_path_length,
    betweenness,
    clustering,
    components,
    diameter,
    induced,
)
from dappnet.metrics.powerlaw import PowerLawFit, fit_powerlaw
from dappnet.metrics.structure import degree_sequence, degree_stats, density, selfloop_only_ratio

SCHEMA_VERSION = "v1"


@dataclass
class NodeScore:
    betweenness: float
    local_clustering: float
    degree: int


@dataclass
class MetricsReport:
    n_nodes: int = 0
    n_edges: int = 0
    degree_histogram: Dict[int, int] = field(default_factory=dict)
    density: float = 0.0
    selfloop_only_ratio: float = 0.0
    modularity: float = 0.0
    communities: Dict[str, int] = field(default_factory=dict)
    n_components: int = 0
    largest_component_size: int = 0
    diameter: int = 0
    global_clustering: float = 0.0
    avg_path_length: float = 0.0
    avg_path_defined: bool = False
    node_scores: Dict[str, NodeScore] = field(default_factory=dict)
    clique_size_histogram: Dict[int, int] = field(default_factory=dict)
    clique_size_histogram_normalized: Dict[int, float] = field(default_factory=dict)
    powerlaw: Optional[PowerLawFit] = None

    def to_dict(self) -> Dict[str, Any]:
        d = asdict(self)
        # JSON object keys must be strings; keep numeric order
        for key in ("degree_histogram", "clique_size_histogram", "clique_size_histogram_normalized"):
            d[key] = {str(k): v for k, v in sorted(d[key].items())}
        return _clean(d)

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "MetricsReport":
        d = dict(d)
        for key in ("degree_histogram", "clique_size_histogram", "clique_size_histogram_normalized"):
            d[key] = {int(k): v for k, v in d.get(key, {}).items()}
        d["node_scores"] = {k: NodeScore(**v) for k, v in d.get("node_scores", {}).items()}
        if d.get("powerlaw") is not None:
            d["powerlaw"] = PowerLawFit(**d["powerlaw"])
        known = set(cls.__dataclass_fields__)
        return cls(**{k: v for k, v in d.items() if k in known})


def _clean(obj: Any) -> Any:
    """NaN/inf are not valid JSON; write them as null."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def component_betweenness(g: WeightedDigraph) -> Dict[Hashable, float]:
    """Betweenness computed separately inside each weak component."""
    adj = as_adjacency(g)
    out: Dict[Hashable, float] = {}
    for comp in components(adj):
        out.update(betweenness(induced(adj, comp)))
    return {n: out[n] for n in g.nodes}


def compute_metrics(
    g: WeightedDigraph,
    *,
    n_contracts: Optional[int] = None,
    seed: Optional[int] = 0,
    clique_budget: Optional[int] = DEFAULT_BUDGET,
    fit_tail: bool = True,
) -> MetricsReport:
    report = MetricsReport(n_nodes=g.n_nodes, n_edges=g.n_edges)
    if g.n_nodes == 0:
        return report
    report.degree_histogram = degree_stats(g)
    report.density = density(g)
    report.selfloop_only_ratio = selfloop_only_ratio(g)
    partition, q = louvain(g, seed)
    report.modularity = q
    report.communities = {str(n): c for n, c in partition.items()}

    adj = as_adjacency(g)
    comps = components(adj)
    report.n_components = len(comps)
    largest = induced(adj, comps[0])
    report.largest_component_size = len(largest)
    report.diameter = diameter(largest)
    report.avg_path_defined = len(largest) >= 2
    report.avg_path_length = avg_path_length(largest)
    local, _ = clustering(adj)
    _, report.global_clustering = clustering(largest)

    bc = component_betweenness(g)
    deg = degree_sequence(g)
    report.node_scores = {str(n): NodeScore(bc[n], local[n], deg[n]) for n in g.nodes}

    report.clique_size_histogram = clique_size_histogram(adj, 3, clique_budget)
    if n_contracts:
        report.clique_size_histogram_normalized = normalized_histogram(
            report.clique_size_histogram, n_contracts
        )
    if fit_tail:
        lcc_degrees = [deg[n] for n in comps[0]]
        if len(lcc_degrees) >= 2:
            report.powerlaw = fit_powerlaw(lcc_degrees)
    return report


def largest_component_degrees(g: WeightedDigraph) -> List[int]:
    comps = components(g)
    if not comps:
        return []
    deg = degree_sequence(g)
    return [deg[n] for n in comps[0]]


def histogram_rows(hist: Dict[int, Any]) -> List[Tuple[int, Any]]:
    return sorted(hist.items())
