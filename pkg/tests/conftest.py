import random
from pathlib import Path
from typing import Dict, List, Tuple

import pytest
from hypothesis import HealthCheck, settings

from dappnet.extract import extract_project
from dappnet.graph import WeightedDigraph

FIXTURES = Path(__file__).parent / "fixtures"

settings.register_profile("default", deadline=None, derandomize=True, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def write_tree(root: Path, files: Dict[str, str]) -> Path:
    for name, text in files.items():
        p = root / name
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(text, encoding="utf-8")
    return root


def call_rows(root: Path, files: Dict[str, str]) -> List[Tuple[str, str, str, str]]:
    write_tree(root, files)
    return [r.as_row() for r in extract_project(root).records]


def random_undirected(rng: random.Random, n: int, p: float) -> WeightedDigraph:
    g = WeightedDigraph(list(range(n)))
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                g.add_edge(i, j)
    return g


def barbell(k: int) -> WeightedDigraph:
    """Two K_k cliques joined by one node adjacent to every clique node."""
    g = WeightedDigraph()
    a = [f"a{i}" for i in range(k)]
    b = [f"b{i}" for i in range(k)]
    for side in (a, b):
        for i, u in enumerate(side):
            for v in side[i + 1:]:
                g.add_edge(u, v)
    for u in a + b:
        g.add_edge("x", u)
    return g


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES
