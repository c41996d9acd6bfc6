"""Network statistics: structure, paths, communities, cliques, tails."""

from dappnet.metrics.cliques import (
    CliqueBudgetExceeded,
    clique_size_histogram,
    maximal_cliques,
    normalized_histogram,
)
from dappnet.metrics.louvain import louvain, louvain_modularity, modularity, undirected_weighted
from dappnet.metrics.paths import (
    avg_path_length,
    betweenness,
    clustering,
    components,
    diameter,
    largest_component,
    transitivity_by_census,
)
from dappnet.metrics.powerlaw import PowerLawFit, fit_powerlaw, sample_discrete_powerlaw
from dappnet.metrics.report import SCHEMA_VERSION, MetricsReport, NodeScore, compute_metrics
from dappnet.metrics.structure import degree_sequence, degree_stats, density, selfloop_only_ratio

__all__ = [
    "CliqueBudgetExceeded",
    "MetricsReport",
    "NodeScore",
    "PowerLawFit",
    "SCHEMA_VERSION",
    "avg_path_length",
    "betweenness",
    "clique_size_histogram",
    "clustering",
    "components",
    "compute_metrics",
    "degree_sequence",
    "degree_stats",
    "density",
    "diameter",
    "fit_powerlaw",
    "largest_component",
    "louvain",
    "louvain_modularity",
    "maximal_cliques",
    "modularity",
    "normalized_histogram",
    "sample_discrete_powerlaw",
    "selfloop_only_ratio",
    "transitivity_by_census",
    "undirected_weighted",
]
