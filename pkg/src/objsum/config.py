"""YAML run configuration.  Relative paths resolve against the config file's directory."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import yaml

from .gds import AffinityConfig
from .importance import DEFAULT_CEILING, DEFAULT_DAMPING, DEFAULT_EPSILON

ALGORITHM_CHOICES = ("dp", "bottom-up", "top-path")
FORMAT_CHOICES = ("text", "structured")
RANK_MODES = ("objectrank", "file")


class ConfigError(ValueError):
    pass


@dataclass
class RankConfig:
    mode: str = "objectrank"
    preset: str = "ga1"
    rates: dict[str, float] = field(default_factory=dict)
    damping: float = DEFAULT_DAMPING
    epsilon: float = DEFAULT_EPSILON
    max_iters: int = 1000
    ceiling: float = DEFAULT_CEILING


@dataclass
class QueryDefaults:
    relation: str | None = None
    l: int = 10
    algorithm: str = "top-path"
    prelim: bool = True
    format: str = "text"


@dataclass
class BenchConfig:
    ls: list[int] = field(default_factory=lambda: [5, 10, 15, 20])
    repetitions: int = 3
    dp_timeout: float = 10.0
    instances: int = 10
    seed: int = 7
    relations: list[str] = field(default_factory=list)
    ns: list[int] = field(default_factory=lambda: [1000, 10000])


@dataclass
class Config:
    path: Path
    schema: Path
    tuples: Path
    artifact: Path
    scores: Path | None = None
    rank: RankConfig = field(default_factory=RankConfig)
    affinity: AffinityConfig = field(default_factory=AffinityConfig)
    query: QueryDefaults = field(default_factory=QueryDefaults)
    bench: BenchConfig = field(default_factory=BenchConfig)

    def check_paths(self) -> None:
        """Every input path the configuration names must exist."""
        for label, p in (("schema", self.schema), ("tuples", self.tuples), ("scores", self.scores)):
            if p is not None and not p.exists():
                raise ConfigError(f"{self.path}: {label} path {p} does not exist")


def _section(doc: Mapping, name: str) -> dict:
    sec = doc.get(name) or {}
    if not isinstance(sec, Mapping):
        raise ConfigError(f"section {name!r} must be a mapping")
    return dict(sec)


def _pick(sec: dict, cls, conv: Mapping[str, Any], where: str):
    unknown = sorted(set(sec) - set(conv))
    if unknown:
        raise ConfigError(f"{where}: unknown keys {unknown}")
    try:
        return cls(**{k: conv[k](v) for k, v in sec.items()})
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def parse_config(doc: Mapping, path: str | Path) -> Config:
    path = Path(path)
    base = path.parent
    if not isinstance(doc, Mapping):
        raise ConfigError(f"{path}: top level must be a mapping")
    known = {"schema", "tuples", "scores", "artifact", "rank", "affinity", "query", "bench"}
    unknown = sorted(set(doc) - known)
    if unknown:
        raise ConfigError(f"{path}: unknown keys {unknown}")
    for key in ("schema", "tuples"):
        if not doc.get(key):
            raise ConfigError(f"{path}: missing {key!r}")

    def resolve(p):
        return (base / str(p)).resolve()

    rank = _pick(_section(doc, "rank"), RankConfig, {
        "mode": str, "preset": str, "rates": lambda d: {str(k): float(v) for k, v in (d or {}).items()},
        "damping": float, "epsilon": float, "max_iters": int, "ceiling": float}, f"{path} rank")
    if rank.mode not in RANK_MODES:
        raise ConfigError(f"{path}: rank.mode must be one of {RANK_MODES}, got {rank.mode!r}")
    if rank.preset not in ("ga1", "ga2"):
        raise ConfigError(f"{path}: rank.preset must be ga1 or ga2, got {rank.preset!r}")
    query = _pick(_section(doc, "query"), QueryDefaults, {
        "relation": str, "l": int, "algorithm": str, "prelim": bool, "format": str}, f"{path} query")
    if query.l < 1:
        raise ConfigError(f"{path}: query.l must be >= 1")
    if query.algorithm not in ALGORITHM_CHOICES:
        raise ConfigError(f"{path}: query.algorithm must be one of {ALGORITHM_CHOICES}")
    if query.format not in FORMAT_CHOICES:
        raise ConfigError(f"{path}: query.format must be one of {FORMAT_CHOICES}")
    bench = _pick(_section(doc, "bench"), BenchConfig, {
        "ls": lambda v: [int(x) for x in v], "repetitions": int, "dp_timeout": float, "instances": int,
        "seed": int, "relations": lambda v: [str(x) for x in v], "ns": lambda v: [int(x) for x in v]},
        f"{path} bench")
    if bench.repetitions < 3:
        raise ConfigError(f"{path}: bench.repetitions must be >= 3")
    try:
        affinity = AffinityConfig.from_dict(_section(doc, "affinity"))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path} affinity: {exc}") from None
    if rank.mode == "file" and not doc.get("scores"):
        raise ConfigError(f"{path}: rank.mode=file needs a scores path")
    artifact = doc.get("artifact") or (Path(str(doc["tuples"])).name + ".osg")
    return Config(path=path, schema=resolve(doc["schema"]), tuples=resolve(doc["tuples"]),
                  artifact=resolve(artifact), scores=resolve(doc["scores"]) if doc.get("scores") else None,
                  rank=rank, affinity=affinity, query=query, bench=bench)


def load_config(path: str | Path) -> Config:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from None
    return parse_config(doc or {}, path)


def toy_config_path() -> Path:
    """Path of the bundled toy dataset's configuration."""
    return Path(__file__).resolve().parent / "data" / "toy" / "config.yaml"
