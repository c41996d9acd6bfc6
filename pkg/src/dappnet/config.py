"""Pipeline configuration and dApp manifests."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import yaml

from dappnet.backbone import MODES
from dappnet.nullmodels import LOUVAIN, WEAK_COMPONENTS
from dappnet.resilience import DEFAULT_GRID, MAX_FRACTION

STAGES = ("extract", "build", "filter", "metrics", "nullmodels", "resilience", "report")
OUTPUT_DIR_ENV = "DAPPNET_OUTPUT_DIR"


class ConfigError(ValueError):
    pass


@dataclass
class DappManifest:
    name: str
    blockchain: str = ""
    category: str = ""
    source_root: str = ""
    notes: Optional[str] = None


@dataclass
class PipelineConfig:
    alpha_threshold: float = 0.05
    filter_mode: str = "either-direction"
    filter_contracts: bool = False
    include_sentinel: bool = True
    removal_grid: Tuple[float, ...] = DEFAULT_GRID
    removal_trials: int = 100
    seed: int = 0
    null_realizations: int = 100
    preserve_degree: bool = False
    partition_source: str = WEAK_COMPONENTS
    min_component_nodes: int = 50
    giant_share: float = 0.9
    second_component_size: int = 2
    clique_budget: int = 10**6
    output_dir: str = "out"
    stages: Tuple[str, ...] = STAGES
    workers: int = 1

    def validate(self) -> "PipelineConfig":
        if not 0.0 < self.alpha_threshold < 1.0:
            raise ConfigError("alpha_threshold must lie in (0, 1)")
        if self.filter_mode not in MODES:
            raise ConfigError(f"filter_mode must be one of {MODES}")
        if not self.stages:
            raise ConfigError("at least one stage must be selected")
        unknown = set(self.stages) - set(STAGES)
        if unknown:
            raise ConfigError(f"unknown stages: {sorted(unknown)}")
        grid = list(self.removal_grid)
        if not grid or any(f < 0 or f > MAX_FRACTION + 1e-12 for f in grid):
            raise ConfigError(f"removal grid must be nonempty within [0, {MAX_FRACTION}]")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("removal grid must be strictly increasing")
        if self.removal_trials < 1 or self.null_realizations < 1:
            raise ConfigError("trial and realization counts must be positive")
        if self.partition_source not in (WEAK_COMPONENTS, LOUVAIN):
            raise ConfigError(f"partition_source must be {WEAK_COMPONENTS} or {LOUVAIN}")
        if not 0.0 < self.giant_share <= 1.0:
            raise ConfigError("giant_share must lie in (0, 1]")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        self.stages = tuple(s for s in STAGES if s in self.stages)
        return self

    @classmethod
    def from_mapping(cls, data: Dict[str, Any]) -> "PipelineConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        data = dict(data)
        for key in ("removal_grid", "stages"):
            if key in data:
                data[key] = tuple(data[key])
        return cls(**data)

    def with_env(self) -> "PipelineConfig":
        if os.environ.get(OUTPUT_DIR_ENV):
            self.output_dir = os.environ[OUTPUT_DIR_ENV]
        return self

    def as_dict(self) -> Dict[str, Any]:
        return {f.name: (list(v) if isinstance(v := getattr(self, f.name), tuple) else v) for f in fields(self)}


def grid_from_step(step: float, stop: float = MAX_FRACTION) -> Tuple[float, ...]:
    n = int(round(stop / step))
    return tuple(round(step * i, 6) for i in range(n + 1))


def _load_structured(path: Path) -> Any:
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        return json.loads(text)
    return yaml.safe_load(text)


def load_manifest(path: Union[str, Path]) -> List[DappManifest]:
    """Read a corpus manifest (YAML or JSON).

    The document holds a ``dapps`` list of entries with name, blockchain,
    category, source_root and optional notes; relative source roots are
    taken relative to the manifest file.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"manifest not found: {path}")
    data = _load_structured(path)
    entries = data.get("dapps") if isinstance(data, dict) else data
    if not entries:
        raise ConfigError(f"manifest {path} lists no dApps")
    out = []
    seen = set()
    for raw in entries:
        if not isinstance(raw, dict) or "name" not in raw or "source_root" not in raw:
            raise ConfigError(f"manifest entry needs name and source_root: {raw!r}")
        extra = set(raw) - {"name", "blockchain", "category", "source_root", "notes"}
        if extra:
            raise ConfigError(f"unknown manifest fields {sorted(extra)} in {raw['name']}")
        name = str(raw["name"])
        if name in seen:
            raise ConfigError(f"duplicate dApp name in manifest: {name}")
        if "/" in name or name in (".", "..", "corpus"):
            raise ConfigError(f"dApp name cannot be used as a directory: {name!r}")
        seen.add(name)
        root = Path(raw["source_root"])
        if not root.is_absolute():
            root = (path.parent / root).resolve()
        out.append(
            DappManifest(
                name=name,
                blockchain=str(raw.get("blockchain", "")),
                category=str(raw.get("category", "")),
                source_root=str(root),
                notes=raw.get("notes"),
            )
        )
    return out


def load_config(path: Union[str, Path]) -> PipelineConfig:
    data = _load_structured(Path(path)) or {}
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must be a mapping")
    return PipelineConfig.from_mapping(data)


def check_manifests(manifests: Sequence[DappManifest]) -> None:
    if not manifests:
        raise ConfigError("empty manifest")
