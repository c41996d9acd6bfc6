import hashlib
import json
import os
from pathlib import Path

import pytest

from dappnet.config import (
    OUTPUT_DIR_ENV,
    ConfigError,
    DappManifest,
    PipelineConfig,
    grid_from_step,
    load_config,
    load_manifest,
)
from dappnet.pipeline import CORPUS_DIR, plan_stages, run_pipeline

from conftest import FIXTURES

GOLDEN = FIXTURES / "golden"
FAST = dict(removal_trials=10, null_realizations=5)


def auction(name="Auction"):
    return DappManifest(name, "Ethereum", "Exchanges", str(FIXTURES / "auction"))


def tree_digest(root: Path, skip=("corpus.json",)) -> dict:
    return {
        str(p.relative_to(root)): hashlib.sha256(p.read_bytes()).hexdigest()
        for p in sorted(root.rglob("*"))
        if p.is_file() and p.name not in skip
    }


def corpus_without_timestamp(root: Path) -> dict:
    d = json.loads((root / CORPUS_DIR / "corpus.json").read_text())
    assert d.pop("generated_at")
    return d


def test_auction_golden_snapshot(tmp_path):
    report = run_pipeline([auction()], PipelineConfig(output_dir=str(tmp_path)))
    assert report.exit_status == 0
    d = tmp_path / "Auction"
    assert (d / "calls.csv").read_text() == (GOLDEN / "auction_calls.csv").read_text()
    assert (d / "contract_graph.dot").read_text() == (GOLDEN / "auction_contract_graph.dot").read_text()
    want = json.loads((GOLDEN / "auction_run.json").read_text())
    assert tree_digest(tmp_path) == want


def test_contract_graph_carries_communities(tmp_path):
    run_pipeline([auction()], PipelineConfig(output_dir=str(tmp_path), stages=("metrics",)))
    dot = (tmp_path / "Auction" / "contract_graph.dot").read_text()
    for name in ("Auction", "Item", "Participant", "Vault", "None"):
        assert f'"{name}" [' in dot and "community=" in dot


def test_empty_manifest_is_config_error(tmp_path):
    with pytest.raises(ConfigError):
        run_pipeline([], PipelineConfig(output_dir=str(tmp_path)))
    empty = tmp_path / "m.yaml"
    empty.write_text("dapps: []\n")
    with pytest.raises(ConfigError):
        load_manifest(empty)


@pytest.mark.parametrize("bad", [
    dict(alpha_threshold=0.0), dict(filter_mode="both"), dict(stages=()), dict(stages=("plot",)),
    dict(removal_grid=(0.0, 0.5)), dict(removal_trials=0), dict(workers=0),
])
def test_invalid_config(tmp_path, bad):
    with pytest.raises(ConfigError):
        run_pipeline([auction()], PipelineConfig(output_dir=str(tmp_path), **bad))


def test_metrics_only_with_prebuilt_graphs(tmp_path):
    cfg = PipelineConfig(output_dir=str(tmp_path), stages=("extract", "build", "filter"))
    run_pipeline([auction()], cfg)
    assert plan_stages(tmp_path / "Auction", ("metrics",)) == ["metrics"]
    report = run_pipeline([auction()], PipelineConfig(output_dir=str(tmp_path), stages=("metrics",)))
    assert report.outcomes[0].ok and report.outcomes[0].stages == ["metrics"]
    assert (tmp_path / "Auction" / "metrics.json").exists()


def test_missing_inputs_enable_earlier_stages(tmp_path):
    assert plan_stages(tmp_path, ("metrics",)) == ["extract", "build", "filter", "metrics"]
    assert plan_stages(tmp_path, ("report",))[-1] == "report"


def test_disabled_stages_untouched(tmp_path):
    run_pipeline([auction()], PipelineConfig(output_dir=str(tmp_path), **FAST))
    d = tmp_path / "Auction"
    frozen = ["calls.csv", "contracts.csv", "contract_graph.csv", "function_graph.csv", "function_backbone.csv"]
    before = {f: ((d / f).read_bytes(), (d / f).stat().st_mtime_ns) for f in frozen}
    run_pipeline([auction()], PipelineConfig(output_dir=str(tmp_path), stages=("metrics", "report"), **FAST))
    after = {f: ((d / f).read_bytes(), (d / f).stat().st_mtime_ns) for f in frozen}
    assert before == after


def test_failing_dapp_is_skipped(tmp_path):
    broken = DappManifest("Broken", "Ethereum", "DeFi", str(tmp_path / "does-not-exist"))
    out = tmp_path / "out"
    report = run_pipeline([auction(), broken], PipelineConfig(output_dir=str(out), **FAST))
    assert report.exit_status == 0
    status = {o.name: o for o in report.outcomes}
    assert status["Auction"].ok and not status["Broken"].ok
    assert status["Broken"].failed_stage == "extract"
    sizes = (out / CORPUS_DIR / "size_classes.csv").read_text()
    assert "Auction" in sizes and "Broken" not in sizes
    summary = corpus_without_timestamp(out)
    assert [d["ok"] for d in summary["dapps"]] == [True, False]


def test_all_failing_gives_nonzero_status(tmp_path):
    broken = DappManifest("Broken", "Ethereum", "DeFi", str(tmp_path / "nope"))
    assert run_pipeline([broken], PipelineConfig(output_dir=str(tmp_path / "o"))).exit_status == 1


def test_manifest_order_does_not_change_tables(tmp_path):
    ms = load_manifest(FIXTURES / "corpus.yaml")
    run_pipeline(ms, PipelineConfig(output_dir=str(tmp_path / "a"), **FAST))
    run_pipeline(list(reversed(ms)), PipelineConfig(output_dir=str(tmp_path / "b"), **FAST))
    assert tree_digest(tmp_path / "a") == tree_digest(tmp_path / "b")
    assert corpus_without_timestamp(tmp_path / "a") == corpus_without_timestamp(tmp_path / "b")


def test_workers_do_not_change_outputs(tmp_path):
    ms = load_manifest(FIXTURES / "corpus.yaml")
    run_pipeline(ms, PipelineConfig(output_dir=str(tmp_path / "serial"), **FAST))
    run_pipeline(ms, PipelineConfig(output_dir=str(tmp_path / "pool"), workers=2, **FAST))
    assert tree_digest(tmp_path / "serial") == tree_digest(tmp_path / "pool")


def test_root_seed_changes_random_outputs(tmp_path):
    ms = load_manifest(FIXTURES / "corpus.yaml")
    run_pipeline(ms, PipelineConfig(output_dir=str(tmp_path / "s0"), seed=0, **FAST))
    run_pipeline(ms, PipelineConfig(output_dir=str(tmp_path / "s1"), seed=1, **FAST))
    a = (tmp_path / "s0" / "Synthetic" / "resilience.csv").read_text()
    b = (tmp_path / "s1" / "Synthetic" / "resilience.csv").read_text()
    assert a != b


def test_manifest_loading(tmp_path):
    ms = load_manifest(FIXTURES / "corpus.yaml")
    assert [m.name for m in ms] == ["Auction", "WETHMock", "Synthetic"]
    assert Path(ms[0].source_root) == (FIXTURES / "auction").resolve()
    j = tmp_path / "m.json"
    j.write_text(json.dumps({"dapps": [{"name": "A", "source_root": "x"}, {"name": "A", "source_root": "y"}]}))
    with pytest.raises(ConfigError):
        load_manifest(j)
    j.write_text(json.dumps({"dapps": [{"name": "A", "source_root": "x", "chain": "?"}]}))
    with pytest.raises(ConfigError):
        load_manifest(j)


def test_config_file_and_env(tmp_path, monkeypatch):
    c = tmp_path / "cfg.yaml"
    c.write_text("alpha_threshold: 0.1\nremoval_grid: [0.0, 0.1]\nstages: [extract, build]\n")
    cfg = load_config(c).validate()
    assert cfg.alpha_threshold == 0.1 and cfg.removal_grid == (0.0, 0.1)
    c.write_text("alpha: 0.1\n")
    with pytest.raises(ConfigError):
        load_config(c)
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path / "env"))
    assert PipelineConfig().with_env().output_dir == str(tmp_path / "env")


def test_grid_from_step():
    assert grid_from_step(0.05) == (0.0, 0.05, 0.1, 0.15, 0.2)
    assert len(grid_from_step(0.01)) == 21
