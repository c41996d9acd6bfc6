"""Run the whole pipeline over the fixture corpus and print a short summary."""

import argparse
import json
import logging
from pathlib import Path

from dappnet.config import PipelineConfig, load_manifest
from dappnet.pipeline import CORPUS_DIR, run_pipeline

ROOT = Path(__file__).resolve().parents[1]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--manifest", type=Path, default=ROOT / "tests" / "fixtures" / "corpus.yaml")
    ap.add_argument("--out", default="out/fixture-corpus")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")

    report = run_pipeline(load_manifest(args.manifest), PipelineConfig(output_dir=args.out, seed=args.seed))
    for o in report.outcomes:
        print(f"{o.name:<12} {'ok' if o.ok else 'FAILED: ' + str(o.error)}")
    summary = json.loads((Path(args.out) / CORPUS_DIR / "corpus.json").read_text())
    print("size classes:", summary["size_classes"])
    print("function/contract ratio:", summary["function_contract_ratio"])
    print("pooled power-law fit:", summary["pooled_powerlaw"])
    print("artifacts in", args.out)


if __name__ == "__main__":
    main()
