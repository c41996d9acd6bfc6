import json

import pytest

from dappnet.cli import main

from conftest import FIXTURES, barbell
from dappnet.export import export_graph


def test_extract_to_stdout(capsys):
    assert main(["extract", str(FIXTURES / "auction")]) == 0
    out = capsys.readouterr().out
    assert out == (FIXTURES / "golden" / "auction_calls.csv").read_text()


def test_build_filter_metrics_chain(tmp_path):
    calls = tmp_path / "calls.csv"
    assert main(["extract", str(FIXTURES / "auction"), "-o", str(calls),
                 "--contracts", str(tmp_path / "contracts.csv")]) == 0
    assert main(["build", str(calls), "-o", str(tmp_path / "g"), "--contracts", str(tmp_path / "contracts.csv")]) == 0
    fg = tmp_path / "g" / "function_graph.csv"
    assert main(["filter", str(fg), "-o", str(tmp_path / "bb.csv"), "--alpha-threshold", "0.2"]) == 0
    assert main(["metrics", str(tmp_path / "g" / "contract_graph.csv"),
                 "--nodes", str(tmp_path / "g" / "contract_graph_nodes.csv"),
                 "-o", str(tmp_path / "m.json"), "--export", str(tmp_path / "c.graphml")]) == 0
    m = json.loads((tmp_path / "m.json").read_text())
    assert m["schema"] == "v1" and m["n_nodes"] == 5
    assert "community" in (tmp_path / "c.graphml").read_text()


def test_resilience_and_nullmodel(tmp_path):
    g = tmp_path / "b.csv"
    export_graph(barbell(50), "edge-csv", g)
    assert main(["resilience", str(g), "--strategy", "betweenness-static", "--grid-step", "0.05",
                 "-o", str(tmp_path / "r.csv")]) == 0
    rows = (tmp_path / "r.csv").read_text().splitlines()
    assert rows[0].startswith("fraction,value,strategy") and len(rows) == 6
    assert main(["nullmodel", str(g), "--null-realizations", "3", "-o", str(tmp_path / "n.json")]) == 0
    assert json.loads((tmp_path / "n.json").read_text())["small_world"]["n_nodes"] == 101


def test_pipeline_env_override_and_report(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("DAPPNET_OUTPUT_DIR", str(tmp_path / "envout"))
    manifest = str(FIXTURES / "corpus.yaml")
    assert main(["pipeline", manifest, "--stages", "extract,build", "-v"]) == 0
    assert (tmp_path / "envout" / "Auction" / "calls.csv").exists()
    assert main(["report", manifest, "--output-dir", str(tmp_path / "flag"),
                 "--removal-trials", "5", "--null-realizations", "3"]) == 0
    assert (tmp_path / "flag" / "corpus" / "corpus.json").exists()
    assert "Auction: ok" in capsys.readouterr().out


def test_invalid_config_exit_code(tmp_path):
    manifest = str(FIXTURES / "corpus.yaml")
    assert main(["pipeline", manifest, "--output-dir", str(tmp_path), "--alpha-threshold", "2"]) == 2
    assert main(["pipeline", str(tmp_path / "missing.yaml"), "--output-dir", str(tmp_path)]) == 2


def test_all_failing_exit_code(tmp_path):
    m = tmp_path / "m.yaml"
    m.write_text("dapps:\n  - name: Ghost\n    source_root: nowhere\n")
    assert main(["pipeline", str(m), "--output-dir", str(tmp_path / "o")]) == 1


def test_unknown_subcommand():
    with pytest.raises(SystemExit):
        main(["plot"])
