"""Command line entry point: ``dappnet <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from dappnet.backbone import MODES, filter_graph
from dappnet.config import (
    OUTPUT_DIR_ENV,
    STAGES,
    ConfigError,
    PipelineConfig,
    grid_from_step,
    load_config,
    load_manifest,
)
from dappnet.export import FORMATS, export_graph, read_edge_csv, read_nodes_csv, rows_csv, write_nodes_csv
from dappnet.extract import emit_call_table, extract_project, read_call_table
from dappnet.metrics.report import compute_metrics
from dappnet.netbuild import build_bipartite, build_contract_graph, project_functions
from dappnet.nullmodels import LOUVAIN, WEAK_COMPONENTS, RandomizationConfig, block_null_summary, small_world_comparison
from dappnet.pipeline import json_safe, run_pipeline
from dappnet.resilience import STRATEGIES, TRACE_CSV_HEADER, DisconnectionRule, removal_experiment, trace_rows

log = logging.getLogger("dappnet")


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _read_graph(path: str, nodes: Optional[str]):
    return read_edge_csv(path, read_nodes_csv(nodes) if nodes else None)


def _grid(args) -> tuple:
    if args.grid:
        return tuple(float(x) for x in args.grid.split(","))
    return grid_from_step(args.grid_step)


def _add_graph_input(p: argparse.ArgumentParser) -> None:
    p.add_argument("graph", help="edge CSV with a source,target,weight header")
    p.add_argument("--nodes", help="node list CSV (keeps isolated nodes)")


def _add_grid(p: argparse.ArgumentParser) -> None:
    p.add_argument("--grid-step", type=float, default=0.01, help="removal grid step over [0, 0.2]")
    p.add_argument("--grid", help="explicit comma-separated removal fractions")


def cmd_extract(args) -> int:
    ext = extract_project(args.source)
    _emit(emit_call_table(ext.records), args.output)
    if args.contracts:
        write_nodes_csv(args.contracts, [c.name for c in ext.contracts])
    for err in ext.errors:
        log.warning("%s", err)
    return 0


def cmd_build(args) -> int:
    records = read_call_table(args.calls)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    declared = read_nodes_csv(args.contracts) if args.contracts else None
    cg = build_contract_graph(records, not args.no_sentinel, declared)
    export_graph(cg, "edge-csv", out / "contract_graph.csv")
    write_nodes_csv(out / "contract_graph_nodes.csv", cg.nodes)
    fg = project_functions(build_bipartite(records, not args.no_sentinel).drop_empty())
    export_graph(fg, "edge-csv", out / "function_graph.csv")
    write_nodes_csv(out / "function_graph_nodes.csv", fg.nodes)
    return 0


def cmd_filter(args) -> int:
    g = _read_graph(args.graph, args.nodes)
    res = filter_graph(g, args.alpha_threshold, args.filter_mode)
    _emit(export_graph(res.filtered, "edge-csv"), args.output)
    log.info("kept %.3f of nodes and %.3f of edges", res.retention_nodes, res.retention_edges)
    return 0


def cmd_metrics(args) -> int:
    g = _read_graph(args.graph, args.nodes)
    rep = compute_metrics(g, n_contracts=args.n_contracts, seed=args.seed, clique_budget=args.clique_budget)
    d = rep.to_dict()
    d = {"schema": "v1", **d}
    _emit(json.dumps(d, indent=2) + "\n", args.output)
    if args.export:
        attrs = {
            n: {"betweenness": s.betweenness, "clustering": s.local_clustering, "degree": s.degree,
                "community": rep.communities.get(n, -1)}
            for n, s in rep.node_scores.items()
        }
        export_graph(g, args.format, args.export, attrs)
    return 0


def cmd_nullmodel(args) -> int:
    g = _read_graph(args.graph, args.nodes)
    rc = RandomizationConfig(seed=args.seed, n_realizations=args.null_realizations,
                             preserve_degree=args.preserve_degree, partition_source=args.partition_source)
    out = {"schema": "v1", "small_world": small_world_comparison(g, rc, args.min_component_nodes).to_dict(),
           "block_null": block_null_summary(g, rc).to_dict()}
    _emit(json.dumps(json_safe(out), indent=2) + "\n", args.output)
    return 0


def cmd_resilience(args) -> int:
    g = _read_graph(args.graph, args.nodes)
    rule = DisconnectionRule(args.giant_share, args.second_component_size)
    strategies = args.strategy or list(STRATEGIES)
    rows = []
    for s in strategies:
        t = removal_experiment(g, s, _grid(args), args.removal_trials, args.seed,
                               rule=rule, min_nodes=args.min_component_nodes)
        rows.extend(trace_rows(t))
        log.info("%s: disconnected at %s", s, t.disconnected_at)
    _emit(rows_csv(TRACE_CSV_HEADER, rows), args.output)
    return 0


def _pipeline_config(args) -> PipelineConfig:
    cfg = load_config(args.config) if args.config else PipelineConfig()
    given = {k: v for k, v in vars(args).items() if v is not None}
    for name in ("alpha_threshold", "filter_mode", "removal_trials", "seed", "null_realizations",
                 "partition_source", "min_component_nodes", "giant_share", "second_component_size",
                 "clique_budget", "output_dir", "workers"):
        if name in given:
            setattr(cfg, name, given[name])
    for flag in ("filter_contracts", "preserve_degree"):
        if given.get(flag):
            setattr(cfg, flag, True)
    if given.get("no_sentinel"):
        cfg.include_sentinel = False
    if args.grid or args.grid_step is not None:
        cfg.removal_grid = tuple(float(x) for x in args.grid.split(",")) if args.grid else grid_from_step(args.grid_step)
    if args.stages:
        cfg.stages = tuple(s.strip() for s in args.stages.split(",") if s.strip())
    if args.output_dir is None:
        cfg.with_env()
    return cfg.validate()


def cmd_pipeline(args, stages: Optional[Sequence[str]] = None) -> int:
    cfg = _pipeline_config(args)
    if stages is not None:
        cfg.stages = tuple(stages)
    manifests = load_manifest(args.manifest)
    report = run_pipeline(manifests, cfg)
    for o in report.outcomes:
        state = "ok" if o.ok else f"FAILED at {o.failed_stage}: {o.error}"
        print(f"{o.name}: {state}")
    return report.exit_status


def cmd_report(args) -> int:
    return cmd_pipeline(args, stages=("report",))


def _add_pipeline_flags(p: argparse.ArgumentParser, with_stages: bool = True) -> None:
    p.add_argument("manifest", help="corpus manifest (YAML or JSON)")
    p.add_argument("--config", help="YAML/JSON file with PipelineConfig fields; flags override it")
    p.add_argument("--output-dir", help=f"output directory (default: ${OUTPUT_DIR_ENV} or ./out)")
    p.add_argument("--alpha-threshold", type=float)
    p.add_argument("--filter-mode", choices=MODES)
    p.add_argument("--filter-contracts", action="store_true", help="also filter contract networks")
    p.add_argument("--no-sentinel", action="store_true", help="drop unresolved call targets")
    p.add_argument("--grid-step", type=float)
    p.add_argument("--grid", help="comma-separated removal fractions")
    p.add_argument("--removal-trials", type=int)
    p.add_argument("--seed", type=int, help="root seed for every randomized stage")
    p.add_argument("--null-realizations", type=int)
    p.add_argument("--preserve-degree", action="store_true")
    p.add_argument("--partition-source", choices=(WEAK_COMPONENTS, LOUVAIN))
    p.add_argument("--min-component-nodes", type=int)
    p.add_argument("--giant-share", type=float)
    p.add_argument("--second-component-size", type=int)
    p.add_argument("--clique-budget", type=int)
    p.add_argument("--workers", type=int)
    if with_stages:
        p.add_argument("--stages", help=f"comma-separated subset of {','.join(STAGES)}")
    else:
        p.set_defaults(stages=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dappnet", description="Smart-contract call networks for dApps.")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    # -v is also accepted after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=argparse.SUPPRESS)
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name: str, **kw) -> argparse.ArgumentParser:
        return sub.add_parser(name, parents=[common], **kw)


    p = add("extract", help="Solidity tree -> call-record CSV")
    p.add_argument("source")
    p.add_argument("-o", "--output")
    p.add_argument("--contracts", help="also write the declared-contract list here")
    p.set_defaults(func=cmd_extract)

    p = add("build", help="call-record CSV -> contract and function graphs")
    p.add_argument("calls")
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.add_argument("--contracts", help="declared-contract list (adds isolated contracts)")
    p.add_argument("--no-sentinel", action="store_true")
    p.set_defaults(func=cmd_build)

    p = add("filter", help="disparity-filter backbone of a weighted graph")
    _add_graph_input(p)
    p.add_argument("-o", "--output")
    p.add_argument("--alpha-threshold", type=float, default=0.05)
    p.add_argument("--filter-mode", choices=MODES, default=MODES[0])
    p.set_defaults(func=cmd_filter)

    p = add("metrics", help="metrics report (JSON) for one graph")
    _add_graph_input(p)
    p.add_argument("-o", "--output")
    p.add_argument("--n-contracts", type=int, help="normalizes the clique histogram")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--clique-budget", type=int, default=10**6)
    p.add_argument("--export", help="also write the graph with node attributes here")
    p.add_argument("--format", choices=FORMATS, default="graphml")
    p.set_defaults(func=cmd_metrics)

    p = add("nullmodel", help="small-world and block-preserving null comparisons")
    _add_graph_input(p)
    p.add_argument("-o", "--output")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--null-realizations", type=int, default=100)
    p.add_argument("--preserve-degree", action="store_true")
    p.add_argument("--partition-source", choices=(WEAK_COMPONENTS, LOUVAIN), default=WEAK_COMPONENTS)
    p.add_argument("--min-component-nodes", type=int, default=50)
    p.set_defaults(func=cmd_nullmodel)

    p = add("resilience", help="node-removal traces for a connected graph")
    _add_graph_input(p)
    p.add_argument("-o", "--output")
    _add_grid(p)
    p.add_argument("--strategy", action="append", choices=STRATEGIES)
    p.add_argument("--removal-trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-component-nodes", type=int, default=50)
    p.add_argument("--giant-share", type=float, default=0.9)
    p.add_argument("--second-component-size", type=int, default=2)
    p.set_defaults(func=cmd_resilience)

    p = add("report", help="bundle stage outputs and write corpus tables and charts")
    _add_pipeline_flags(p, with_stages=False)
    p.set_defaults(func=cmd_report)

    p = add("pipeline", help="run the full per-dApp and corpus pipeline")
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_pipeline)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError, ValueError) as exc:
        log.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
