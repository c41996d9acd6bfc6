"""Per-dApp and per-corpus orchestration.

Every stage reads its inputs from files written by earlier stages under
``<output_dir>/<dapp>/`` and writes its own files there. A stage that is
not selected leaves its files untouched; when a selected stage finds its
inputs missing, the producing stage is run first.

Seeds: each randomized step uses ``derive_seed(cfg.seed, step, dapp)``.
"""

from __future__ import annotations

import json
import logging
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from dappnet import charts
from dappnet.backbone import filter_graph
from dappnet.config import STAGES, ConfigError, DappManifest, PipelineConfig, check_manifests
from dappnet.export import (
    adjacency_matrix_csv,
    bipartite_csv,
    export_graph,
    histogram_csv,
    read_edge_csv,
    read_nodes_csv,
    rows_csv,
    write_nodes_csv,
)
from dappnet.extract import emit_call_table, extract_project, read_call_table
from dappnet.graph import WeightedDigraph
from dappnet.metrics.powerlaw import fit_powerlaw
from dappnet.metrics.report import SCHEMA_VERSION, compute_metrics, largest_component_degrees
from dappnet.netbuild import (
    build_bipartite,
    build_contract_graph,
    classify_size,
    display_names,
    project_functions,
)
from dappnet.nullmodels import RandomizationConfig, block_null_summary, small_world_comparison
from dappnet.metrics.paths import as_adjacency, components
from dappnet.resilience import (
    STRATEGIES,
    TRACE_CSV_HEADER,
    DisconnectionRule,
    critical_threshold,
    removal_experiment,
    trace_rows,
)
from dappnet.seeding import derive_seed

log = logging.getLogger(__name__)

CORPUS_DIR = "corpus"

# files each stage needs from earlier stages
REQUIRES = {
    "extract": (),
    "build": ("calls.csv", "contracts.csv"),
    "filter": ("function_graph.csv", "function_graph_nodes.csv"),
    "metrics": ("build.json", "contract_graph.csv", "contract_graph_nodes.csv",
                "function_backbone.csv", "function_backbone_nodes.csv", "backbone.json"),
    "nullmodels": ("function_backbone.csv", "function_backbone_nodes.csv"),
    "resilience": ("function_backbone.csv", "function_backbone_nodes.csv"),
    "report": ("build.json", "metrics.json"),
}
PRODUCER = {
    "calls.csv": "extract", "contracts.csv": "extract",
    "build.json": "build", "contract_graph.csv": "build", "contract_graph_nodes.csv": "build",
    "function_graph.csv": "build", "function_graph_nodes.csv": "build",
    "function_backbone.csv": "filter", "function_backbone_nodes.csv": "filter", "backbone.json": "filter",
    "metrics.json": "metrics",
}


def _dump_json(path: Path, obj: Any) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=False, allow_nan=False) + "\n", encoding="utf-8")


def _load_json(path: Path) -> Any:
    return json.loads(path.read_text(encoding="utf-8"))


def _finite(x: Optional[float]) -> Optional[float]:
    return None if x is None or (isinstance(x, float) and not math.isfinite(x)) else x


def json_safe(obj: Any) -> Any:
    if isinstance(obj, float):
        return _finite(obj)
    if isinstance(obj, dict):
        return {k: json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_safe(v) for v in obj]
    return obj


def _read_graph(d: Path, stem: str) -> WeightedDigraph:
    return read_edge_csv(d / f"{stem}.csv", read_nodes_csv(d / f"{stem}_nodes.csv"))


def _write_graph(d: Path, stem: str, g: WeightedDigraph) -> None:
    export_graph(g, "edge-csv", d / f"{stem}.csv")
    write_nodes_csv(d / f"{stem}_nodes.csv", g.nodes)


def _lcc(g: WeightedDigraph) -> WeightedDigraph:
    comps = components(g)
    return g.subgraph(comps[0]) if comps else g


def plan_stages(d: Path, selected: Sequence[str]) -> List[str]:
    """Selected stages plus any earlier stage whose outputs are missing."""
    run = set(selected)
    changed = True
    while changed:
        changed = False
        for stage in list(run):
            for name in REQUIRES[stage]:
                producer = PRODUCER[name]
                if producer not in run and not (d / name).exists():
                    log.info("%s: %s missing, enabling stage %s", d.name, name, producer)
                    run.add(producer)
                    changed = True
    return [s for s in STAGES if s in run]


# ---------------------------------------------------------------- stages

def stage_extract(m: DappManifest, d: Path, cfg: PipelineConfig) -> None:
    root = Path(m.source_root)
    if not root.is_dir():
        raise FileNotFoundError(f"source_root does not exist: {root}")
    ext = extract_project(root)
    (d / "calls.csv").write_text(emit_call_table(ext.records), encoding="utf-8")
    write_nodes_csv(d / "contracts.csv", [c.name for c in ext.contracts])
    _dump_json(d / "extract.json", {"n_records": len(ext.records), "errors": ext.errors})


def stage_build(m: DappManifest, d: Path, cfg: PipelineConfig) -> None:
    records = read_call_table(d / "calls.csv")
    declared = read_nodes_csv(d / "contracts.csv")
    cg = build_contract_graph(records, cfg.include_sentinel, declared)
    _write_graph(d, "contract_graph", cg)
    (d / "contract_matrix.csv").write_text(adjacency_matrix_csv(cg), encoding="utf-8")

    bip = build_bipartite(records, cfg.include_sentinel)
    (d / "bipartite.csv").write_text(bipartite_csv(bip), encoding="utf-8")
    fg = project_functions(bip.drop_empty())
    _write_graph(d, "function_graph", fg)
    (d / "function_matrix.csv").write_text(
        adjacency_matrix_csv(fg, display_names(fg.nodes), digits=3), encoding="utf-8"
    )

    sources = sorted({r.source_contract for r in records})
    functions = {(r.source_contract, r.source_function) for r in records}
    n_contracts = len(sources)
    _dump_json(d / "build.json", {
        "dapp": m.name,
        "blockchain": m.blockchain,
        "category": m.category,
        "n_records": len(records),
        "n_sentinel_records": sum(r.target_contract is None for r in records),
        "n_declared_contracts": len(declared),
        "n_contracts": n_contracts,
        "n_functions": len(functions),
        "function_contract_ratio": len(functions) / n_contracts if n_contracts else None,
        "size_class": classify_size(n_contracts).value if n_contracts else None,
        "include_sentinel": cfg.include_sentinel,
    })


def stage_filter(m: DappManifest, d: Path, cfg: PipelineConfig) -> None:
    fg = _read_graph(d, "function_graph")
    res = filter_graph(fg, cfg.alpha_threshold, cfg.filter_mode)
    _write_graph(d, "function_backbone", res.filtered)
    summary = {
        "alpha_threshold": res.alpha_threshold,
        "mode": res.mode,
        "function_network": {
            "retention_nodes": res.retention_nodes,
            "retention_edges": res.retention_edges,
            "n_nodes": res.filtered.n_nodes,
            "n_edges": res.filtered.n_edges,
        },
    }
    if cfg.filter_contracts:
        cres = filter_graph(_read_graph(d, "contract_graph"), cfg.alpha_threshold, cfg.filter_mode)
        _write_graph(d, "contract_backbone", cres.filtered)
        summary["contract_network"] = {
            "retention_nodes": cres.retention_nodes,
            "retention_edges": cres.retention_edges,
            "n_nodes": cres.filtered.n_nodes,
            "n_edges": cres.filtered.n_edges,
        }
    _dump_json(d / "backbone.json", summary)


def _node_attrs(report) -> Dict[str, Dict[str, Any]]:
    return {
        name: {
            "betweenness": round(s.betweenness, 6),
            "clustering": round(s.local_clustering, 6),
            "degree": s.degree,
            "community": report.communities.get(name, -1),
        }
        for name, s in report.node_scores.items()
    }


def stage_metrics(m: DappManifest, d: Path, cfg: PipelineConfig) -> None:
    info = _load_json(d / "build.json")
    n_contracts = info["n_contracts"] or None
    contract_net = _read_graph(d, "contract_graph")
    if cfg.filter_contracts and (d / "contract_backbone.csv").exists():
        contract_net = _read_graph(d, "contract_backbone")
    function_net = _read_graph(d, "function_backbone")
    seed = derive_seed(cfg.seed, "louvain", m.name)
    out: Dict[str, Any] = {"schema": SCHEMA_VERSION, "dapp": m.name}
    for key, g, fit in (("contract_network", contract_net, False), ("function_network", function_net, True)):
        rep = compute_metrics(g, n_contracts=n_contracts, seed=seed,
                              clique_budget=cfg.clique_budget, fit_tail=fit)
        out[key] = rep.to_dict()
        stem = key.split("_")[0]
        attrs = _node_attrs(rep)
        export_graph(g, "dot", d / f"{stem}_graph.dot", attrs)
        export_graph(g, "graphml", d / f"{stem}_graph.graphml", attrs)
        (d / f"{stem}_degree_histogram.csv").write_text(
            histogram_csv(rep.degree_histogram, "degree"), encoding="utf-8")
        (d / f"{stem}_clique_sizes.csv").write_text(
            histogram_csv(rep.clique_size_histogram, "size"), encoding="utf-8")
    out["backbone"] = _load_json(d / "backbone.json")
    _dump_json(d / "metrics.json", out)


def stage_nullmodels(m: DappManifest, d: Path, cfg: PipelineConfig) -> None:
    g = _read_graph(d, "function_backbone")
    rc = RandomizationConfig(
        seed=derive_seed(cfg.seed, "nullmodels", m.name),
        n_realizations=cfg.null_realizations,
        preserve_degree=cfg.preserve_degree,
        partition_source=cfg.partition_source,
    )
    sw = small_world_comparison(g, rc, cfg.min_component_nodes)
    out: Dict[str, Any] = {"schema": SCHEMA_VERSION, "dapp": m.name, "small_world": sw.to_dict()}
    out["block_null"] = block_null_summary(g, rc).to_dict() if g.n_edges else None
    _dump_json(d / "null_models.json", json_safe(out))


def stage_resilience(m: DappManifest, d: Path, cfg: PipelineConfig) -> None:
    g = _lcc(_read_graph(d, "function_backbone"))
    out: Dict[str, Any] = {"schema": SCHEMA_VERSION, "dapp": m.name, "grid": list(cfg.removal_grid)}
    n = len(as_adjacency(g))
    if n < cfg.min_component_nodes:
        out.update(skipped=True, note=f"largest component has {n} nodes (< {cfg.min_component_nodes})",
                   traces=[], critical=None)
        log.info("%s: resilience skipped (%s)", m.name, out["note"])
        (d / "resilience.csv").write_text(rows_csv(TRACE_CSV_HEADER, []), encoding="utf-8")
        _dump_json(d / "resilience.json", out)
        return
    rule = DisconnectionRule(cfg.giant_share, cfg.second_component_size)
    seed = derive_seed(cfg.seed, "resilience", m.name)
    traces = [
        removal_experiment(g, s, cfg.removal_grid, cfg.removal_trials, seed,
                           rule=rule, min_nodes=cfg.min_component_nodes)
        for s in STRATEGIES
    ]
    rows = [r for t in traces for r in trace_rows(t)]
    (d / "resilience.csv").write_text(rows_csv(TRACE_CSV_HEADER, rows), encoding="utf-8")
    out.update(skipped=False, note="", traces=[t.to_dict() for t in traces],
               critical=critical_threshold(traces, m.name).to_dict())
    _dump_json(d / "resilience.json", json_safe(out))


def stage_report(m: DappManifest, d: Path, cfg: PipelineConfig) -> None:
    """Bundle stage outputs into report.json and draw the per-dApp charts."""
    metrics = _load_json(d / "metrics.json")
    bundle: Dict[str, Any] = {
        "schema": SCHEMA_VERSION,
        "dapp": m.name,
        "blockchain": m.blockchain,
        "category": m.category,
        "build": _load_json(d / "build.json"),
        "contract_network": metrics["contract_network"],
        "function_network": metrics["function_network"],
        "backbone": metrics["backbone"],
        "null_models": _load_json(d / "null_models.json") if (d / "null_models.json").exists() else None,
        "resilience": _load_json(d / "resilience.json") if (d / "resilience.json").exists() else None,
    }
    _dump_json(d / "report.json", bundle)
    fn = metrics["function_network"]
    chart_input: Dict[str, Any] = {
        "degree_histogram": fn.get("degree_histogram"),
        "clique_size_histogram": fn.get("clique_size_histogram"),
    }
    if bundle["null_models"]:
        sw = dict(bundle["null_models"]["small_world"], dapp=m.name)
        chart_input["small_world"] = [sw]
    if bundle["resilience"]:
        chart_input["resilience"] = bundle["resilience"]
    charts.render_charts(chart_input, d / "charts")


STAGE_FUNCS = {
    "extract": stage_extract,
    "build": stage_build,
    "filter": stage_filter,
    "metrics": stage_metrics,
    "nullmodels": stage_nullmodels,
    "resilience": stage_resilience,
    "report": stage_report,
}


@dataclass
class DappOutcome:
    name: str
    ok: bool
    stages: List[str] = field(default_factory=list)
    error: Optional[str] = None
    failed_stage: Optional[str] = None


def run_dapp(m: DappManifest, cfg: PipelineConfig) -> DappOutcome:
    d = Path(cfg.output_dir) / m.name
    d.mkdir(parents=True, exist_ok=True)
    stages = plan_stages(d, cfg.stages)
    outcome = DappOutcome(m.name, True, stages)
    for stage in stages:
        try:
            STAGE_FUNCS[stage](m, d, cfg)
        except Exception as exc:  # one dApp failing must not stop the corpus
            log.error("%s: stage %s failed: %s", m.name, stage, exc)
            outcome.ok = False
            outcome.failed_stage = stage
            outcome.error = f"{type(exc).__name__}: {exc}"
            break
    return outcome


# ---------------------------------------------------------------- corpus

@dataclass
class CorpusReport:
    outcomes: List[DappOutcome]
    summary: Dict[str, Any] = field(default_factory=dict)

    @property
    def exit_status(self) -> int:
        return 0 if any(o.ok for o in self.outcomes) else 1


def _describe(values: Sequence[float]) -> Dict[str, Optional[float]]:
    if not values:
        return {"n": 0, "mean": None, "median": None, "std": None, "min": None, "max": None}
    return {
        "n": len(values),
        "mean": statistics.fmean(values),
        "median": statistics.median(values),
        "std": statistics.stdev(values) if len(values) > 1 else 0.0,
        "min": min(values),
        "max": max(values),
    }


def aggregate_corpus(manifests: Sequence[DappManifest], cfg: PipelineConfig,
                     outcomes: Sequence[DappOutcome]) -> Dict[str, Any]:
    """Corpus tables and charts. Rows are ordered by dApp name, so the
    result does not depend on manifest order."""
    root = Path(cfg.output_dir)
    cdir = root / CORPUS_DIR
    cdir.mkdir(parents=True, exist_ok=True)
    status = {o.name: o for o in outcomes}
    entries = sorted(manifests, key=lambda m: m.name)
    loaded = []
    for m in entries:
        d = root / m.name
        if not status[m.name].ok or not (d / "report.json").exists():
            continue
        loaded.append((m, _load_json(d / "report.json")))

    size_rows, ratio_rows, panel_rows, threshold_rows, sw_rows = [], [], [], [], []
    pooled: Dict[str, Dict[int, int]] = {"contract_network": {}, "function_network": {}}
    cliques: Dict[int, float] = {}
    densities: Dict[str, List[float]] = {"contract_network": [], "function_network": []}
    loops: Dict[str, float] = {}
    lcc_degrees: List[int] = []
    for m, rep in loaded:
        b = rep["build"]
        size_rows.append((m.name, m.blockchain, m.category, b["n_contracts"], b["size_class"] or ""))
        ratio_rows.append((m.name, m.category, b["n_functions"], b["n_contracts"],
                           b["function_contract_ratio"] if b["function_contract_ratio"] is not None else ""))
        for key in pooled:
            net = rep[key]
            panel_rows.append((m.name, key.split("_")[0], net["n_nodes"], net["n_edges"], net["density"],
                               net["selfloop_only_ratio"], net["modularity"], net["global_clustering"]))
            densities[key].append(net["density"])
            for k, v in net["degree_histogram"].items():
                pooled[key][int(k)] = pooled[key].get(int(k), 0) + v
        loops[m.name] = rep["contract_network"]["selfloop_only_ratio"]
        for k, v in rep["function_network"]["clique_size_histogram_normalized"].items():
            cliques[int(k)] = cliques.get(int(k), 0.0) + v
        g = _read_graph(root / m.name, "function_backbone")
        lcc_degrees.extend(largest_component_degrees(g))
        res = rep.get("resilience")
        if res and not res.get("skipped") and res.get("critical"):
            crit = res["critical"]
            threshold_rows.append((m.name, crit["threshold_fraction"] if crit["threshold_fraction"] is not None else "",
                                   len(crit["removed_nodes"]), ";".join(crit["removed_nodes"])))
        nm = rep.get("null_models")
        if nm and not nm["small_world"].get("skipped"):
            sw_rows.append(dict(nm["small_world"], dapp=m.name))

    def write(name: str, text: str) -> None:
        (cdir / name).write_text(text, encoding="utf-8")

    write("size_classes.csv", rows_csv(("dapp", "blockchain", "category", "n_contracts", "size_class"), size_rows))
    write("function_contract_ratio.csv",
          rows_csv(("dapp", "category", "n_functions", "n_contracts", "ratio"), ratio_rows))
    write("network_panels.csv", rows_csv(("dapp", "network", "n_nodes", "n_edges", "density",
                                          "selfloop_only_ratio", "modularity", "global_clustering"), panel_rows))
    for key, hist in pooled.items():
        write(f"{key.split('_')[0]}_degree_histogram.csv", histogram_csv(hist, "degree"))
    write("clique_sizes_normalized.csv", histogram_csv(cliques, "size", "normalized_count"))
    write("thresholds.csv", rows_csv(("dapp", "threshold_fraction", "n_removed", "removed_nodes"), threshold_rows))
    write("small_world.csv", rows_csv(
        ("dapp", "real_avg_path", "random_avg_path_mean", "real_clustering", "random_clustering_mean"),
        [(r["dapp"], r["real_avg_path"], r["random_avg_path_mean"], r["real_clustering"],
          r["random_clustering_mean"]) for r in sw_rows]))

    fit = fit_powerlaw(lcc_degrees) if len(lcc_degrees) >= 2 else None
    class_counts: Dict[str, int] = {}
    for row in size_rows:
        if row[4]:
            class_counts[row[4]] = class_counts.get(row[4], 0) + 1
    thresholds = [r[1] for r in threshold_rows if r[1] != ""]
    summary = {
        "schema": SCHEMA_VERSION,
        "generated_at": None,
        "config": cfg.as_dict(),
        "dapps": [
            {"name": m.name, "ok": status[m.name].ok, "failed_stage": status[m.name].failed_stage,
             "error": status[m.name].error}
            for m in entries
        ],
        "size_classes": class_counts,
        "function_contract_ratio": _describe([r[4] for r in ratio_rows if r[4] != ""]),
        "density": {k.split("_")[0]: _describe(v) for k, v in densities.items()},
        "pooled_powerlaw": fit.__dict__ if fit else None,
        "critical_threshold": _describe(thresholds),
    }
    summary["config"].pop("output_dir")
    summary["config"].pop("workers")
    charts.render_charts(
        {
            "degree_histogram": pooled["function_network"],
            "density_values": densities["function_network"],
            "selfloop_ratios": loops,
            "clique_size_histogram": cliques,
            "small_world": sw_rows,
        },
        cdir / "charts",
    )
    return json_safe(summary)


def run_pipeline(manifests: Sequence[DappManifest], cfg: PipelineConfig) -> CorpusReport:
    """Run the selected stages for every dApp, then the corpus aggregation
    when the report stage is selected. Raises ConfigError on bad input."""
    check_manifests(manifests)
    cfg.validate()
    names = [m.name for m in manifests]
    if len(set(names)) != len(names):
        raise ConfigError("dApp names must be unique")
    Path(cfg.output_dir).mkdir(parents=True, exist_ok=True)
    if cfg.workers > 1 and len(manifests) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            outcomes = list(pool.map(run_dapp, manifests, [cfg] * len(manifests)))
    else:
        outcomes = [run_dapp(m, cfg) for m in manifests]
    report = CorpusReport(outcomes)
    for o in outcomes:
        if not o.ok:
            log.warning("dApp %s skipped after failing stage %s: %s", o.name, o.failed_stage, o.error)
    if "report" in cfg.stages:
        report.summary = aggregate_corpus(manifests, cfg, outcomes)
        report.summary["generated_at"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
        _dump_json(Path(cfg.output_dir) / CORPUS_DIR / "corpus.json", report.summary)
    return report
