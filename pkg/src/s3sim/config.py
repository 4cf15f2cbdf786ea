"""Run configuration: one structured file (YAML or JSON) per run."""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any

import yaml

from .agent import Attitude, MemoryConfig, SourceRelation
from .cognition import CognitionBackend, HttpBackend, HttpConfig, RuleBackend, RuleProfile
from .engine import EngineConfig, EventConfig, RecommendationConfig, SeedPost
from .network import CategoryThresholds


@dataclass(frozen=True)
class BackendConfig:
    kind: str = "rule"
    rule: RuleProfile = field(default_factory=RuleProfile)
    http: HttpConfig = field(default_factory=HttpConfig)


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    backend: BackendConfig = field(default_factory=BackendConfig)
    memory: MemoryConfig = field(default_factory=MemoryConfig)
    emotion_decay_steps: int = 3
    workers: int = 1
    recommendation: RecommendationConfig = field(default_factory=RecommendationConfig)
    categories: CategoryThresholds = field(default_factory=CategoryThresholds)
    event: EventConfig = field(default_factory=EventConfig)
    negative_ratio: float = 1.0

    def engine_config(self) -> EngineConfig:
        return EngineConfig(self.seed, self.emotion_decay_steps, self.workers, self.memory, self.recommendation)

    def make_backend(self) -> CognitionBackend:
        if self.backend.kind == "rule":
            return RuleBackend(self.seed, self.backend.rule)
        if self.backend.kind == "http":
            return HttpBackend(self.backend.http)
        raise ValueError(f"unknown backend kind {self.backend.kind!r}")

    def to_dict(self) -> dict:
        return _plain(self)

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def _plain(obj: Any) -> Any:
    if dataclasses.is_dataclass(obj):
        return {f.name: _plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {(k.value if isinstance(k, Enum) else k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, Enum):
        return obj.value
    return obj


def _only(cls, data: dict | None, **converted) -> Any:
    data = dict(data or {})
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ValueError(f"unknown {cls.__name__} keys: {sorted(unknown)}")
    tuple_fields = {f.name for f in dataclasses.fields(cls) if "tuple" in str(f.type)}
    for k in tuple_fields & set(data):
        if isinstance(data[k], list):
            data[k] = tuple(data[k])
    data.update(converted)
    return cls(**data)


def _event(data: dict | None) -> EventConfig:
    data = dict(data or {})
    posts = []
    for p in data.pop("seed_posts", []) or []:
        p = dict(p)
        if p.get("stance") is not None:
            p["stance"] = Attitude(p["stance"])
        posts.append(_only(SeedPost, p))
    kw = {"seed_posts": tuple(posts)}
    if "default_stance" in data:
        kw["default_stance"] = Attitude(data.pop("default_stance"))
    return _only(EventConfig, data, **kw)


def _memory(data: dict | None) -> MemoryConfig:
    data = dict(data or {})
    kw = {}
    if "authenticity" in data:
        table = dict(MemoryConfig().authenticity)
        table.update({SourceRelation(k): float(v) for k, v in data.pop("authenticity").items()})
        kw["authenticity"] = table
    return _only(MemoryConfig, data, **kw)


def config_from_dict(data: dict) -> RunConfig:
    data = dict(data or {})
    b = dict(data.pop("backend", {}) or {})
    backend = _only(
        BackendConfig, b,
        rule=_only(RuleProfile, b.get("rule")),
        http=_only(HttpConfig, b.get("http")),
    )
    return _only(
        RunConfig, data,
        backend=backend,
        memory=_memory(data.get("memory")),
        recommendation=_only(RecommendationConfig, data.get("recommendation")),
        categories=_only(CategoryThresholds, data.get("categories")),
        event=_event(data.get("event")),
    )


def load_config(path: str | Path | None) -> RunConfig:
    if path is None:
        return RunConfig()
    text = Path(path).read_text(encoding="utf-8")
    data = json.loads(text) if str(path).endswith(".json") else yaml.safe_load(text)
    return config_from_dict(data or {})


def override(cfg: RunConfig, **changes) -> RunConfig:
    """Apply CLI overrides; None values are ignored."""
    changes = {k: v for k, v in changes.items() if v is not None}
    if "backend" in changes:
        changes["backend"] = dataclasses.replace(cfg.backend, kind=changes["backend"])
    if "max_steps" in changes:
        changes["event"] = dataclasses.replace(cfg.event, max_steps=changes.pop("max_steps"))
    return dataclasses.replace(cfg, **changes)
