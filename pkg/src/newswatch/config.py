"""Application configuration: file loading, defaults, and fingerprinting.

Config files are YAML (or JSON) with nested sections; flat dotted keys like
``cluster.eps`` are also accepted.  ``NEWSWATCH_DATA_DIR`` overrides the
store path.
"""
from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import yaml


@dataclass(frozen=True)
class EmbeddingSettings:
    dim: int = 512
    provider: str = "hashed_bow"  # hashed_bow | file
    vectors_path: str | None = None
    seed: int = 0


@dataclass(frozen=True)
class ClusterSettings:
    eps: float = 0.55
    min_members: int = 2


@dataclass(frozen=True)
class DedupSettings:
    n: int = 3
    theta: float = 0.5
    stopwords_path: str | None = None


@dataclass(frozen=True)
class FeatureSettings:
    families: str = "ngrams,lexicon,style,nela"
    min_df: int = 2

    def family_set(self) -> set[str]:
        return {f.strip() for f in self.families.split(",") if f.strip()}


@dataclass(frozen=True)
class ServiceSettings:
    port: int = 8080
    data_dir: str = "./data"
    articles_path: str | None = None
    model_path: str | None = None
    webui_dir: str | None = None
    batch_period_hours: float = 24.0
    max_score_bytes: int = 1_000_000
    poll_seconds: float = 60.0


@dataclass(frozen=True)
class AppConfig:
    embedding: EmbeddingSettings = field(default_factory=EmbeddingSettings)
    cluster: ClusterSettings = field(default_factory=ClusterSettings)
    dedup: DedupSettings = field(default_factory=DedupSettings)
    features: FeatureSettings = field(default_factory=FeatureSettings)
    service: ServiceSettings = field(default_factory=ServiceSettings)

    def resolved_data_dir(self) -> Path:
        return Path(os.environ.get("NEWSWATCH_DATA_DIR") or self.service.data_dir)

    def fingerprint(self) -> str:
        """Hash of the scoring-relevant settings (service knobs excluded)."""
        payload = {
            "embedding": asdict(self.embedding),
            "cluster": asdict(self.cluster),
            "dedup": asdict(self.dedup),
            "features": asdict(self.features),
        }
        canon = json.dumps(payload, sort_keys=True)
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]


_SECTIONS = {
    "embedding": EmbeddingSettings,
    "cluster": ClusterSettings,
    "dedup": DedupSettings,
    "features": FeatureSettings,
    "service": ServiceSettings,
}


def _nest_dotted(raw: dict) -> dict:
    nested: dict = {}
    for key, value in raw.items():
        if isinstance(key, str) and "." in key:
            section, _, leaf = key.partition(".")
            nested.setdefault(section, {})[leaf] = value
        elif isinstance(value, dict):
            nested.setdefault(key, {}).update(value)
        else:
            nested[key] = value
    return nested


def config_from_dict(raw: dict) -> AppConfig:
    nested = _nest_dotted(raw or {})
    kwargs = {}
    for section, cls in _SECTIONS.items():
        data = nested.pop(section, {})
        if not isinstance(data, dict):
            raise ValueError(f"config section {section!r} must be a mapping")
        valid = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - valid
        if unknown:
            raise ValueError(f"unknown config keys in {section!r}: {sorted(unknown)}")
        kwargs[section] = cls(**data)
    if nested:
        raise ValueError(f"unknown config sections: {sorted(nested)}")
    return AppConfig(**kwargs)


def load_config(path: str | Path | None) -> AppConfig:
    if path is None:
        return AppConfig()
    text = Path(path).read_text(encoding="utf-8")
    raw = yaml.safe_load(text) or {}
    if not isinstance(raw, dict):
        raise ValueError(f"config file {path} must hold a mapping")
    return config_from_dict(raw)


def with_overrides(config: AppConfig, **service_overrides) -> AppConfig:
    """Rebuild the config with non-None service-level overrides applied."""
    updates = {k: v for k, v in service_overrides.items() if v is not None}
    if not updates:
        return config
    return replace(config, service=replace(config.service, **updates))
