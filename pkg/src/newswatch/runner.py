"""Batch orchestrator: ingest -> embed -> cluster -> dedup -> score -> persist.

Each run writes ``runs/<run_id>/manifest.json`` plus one JSON document per
event, then swaps ``latest.json`` atomically so readers never see a torn
run.  Persisted bytes are deterministic per (window, config); stage timings
live only on the returned PipelineRun.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from datetime import datetime, timedelta
from pathlib import Path

from .clustering import ClusteringConfig, Event, build_events
from .config import AppConfig
from .corpus import (
    Article,
    Batch,
    CorpusError,
    load_articles,
    persist_batch,
    select_window,
    write_json_atomic,
)
from .dedup import DedupConfig, dedup_event, default_stopwords, load_stopwords
from .embedding import FileEmbedder, HashedBowEmbedder
from .model import Model, load_model, score_article

logger = logging.getLogger(__name__)

LATEST_POINTER = "latest.json"


@dataclass
class PipelineRun:
    run_id: str
    window_start: datetime
    window_end: datetime
    counts: dict[str, int]
    timings: dict[str, float]
    config_fingerprint: str
    manifest_path: Path


def make_embedder(config: AppConfig):
    emb = config.embedding
    if emb.provider == "hashed_bow":
        return HashedBowEmbedder(dim=emb.dim, seed=emb.seed)
    if emb.provider == "file":
        if not emb.vectors_path:
            raise ValueError("embedding.provider=file requires embedding.vectors_path")
        return FileEmbedder(emb.vectors_path, dim=emb.dim)
    raise ValueError(f"unknown embedding provider: {emb.provider!r}")


def make_dedup_config(config: AppConfig) -> DedupConfig:
    d = config.dedup
    stopwords = load_stopwords(d.stopwords_path) if d.stopwords_path else default_stopwords()
    return DedupConfig(n=d.n, theta=d.theta, stopwords=stopwords)


def run_batch(
    config: AppConfig,
    window_end: datetime,
    articles: list[Article] | None = None,
    model: Model | None = None,
) -> PipelineRun:
    """Run the four pipeline stages for one window and persist the result.

    Rerunning with the same window and config overwrites the run directory
    with identical bytes.
    """
    timings: dict[str, float] = {}
    if model is None:
        if not config.service.model_path:
            raise CorpusError("no model configured; train one and set service.model_path")
        model = load_model(config.service.model_path)

    t0 = time.perf_counter()
    if articles is None:
        if not config.service.articles_path:
            raise CorpusError("no article store configured (service.articles_path)")
        articles = load_articles(config.service.articles_path)
    period = timedelta(hours=config.service.batch_period_hours)
    batch = select_window(articles, window_end, period)
    timings["ingest"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    embedder = make_embedder(config)
    vectors = [embedder.vector_for(a) for a in batch.articles]
    cluster_cfg = ClusteringConfig(
        eps=config.cluster.eps, min_members=config.cluster.min_members
    )
    events, noise_ids = build_events(batch, vectors, cluster_cfg)
    timings["cluster"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    by_id = {a.id: a for a in batch.articles}
    dedup_cfg = make_dedup_config(config)
    deduped_events: list[Event] = []
    duplicates: dict[str, list[str]] = {}
    n_duplicates = 0
    for event in events:
        members = [by_id[mid] for mid in event.member_ids]
        kept, _groups = dedup_event(members, dedup_cfg)
        kept_ids = tuple(a.id for a in kept)
        removed = [mid for mid in event.member_ids if mid not in set(kept_ids)]
        deduped_events.append(
            Event(id=event.id, member_ids=kept_ids, centroid=event.centroid)
        )
        duplicates[event.id] = removed
        n_duplicates += len(removed)
    timings["dedup"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    scores = {
        mid: score_article(model, by_id[mid])
        for event in deduped_events
        for mid in event.member_ids
    }
    timings["score"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    run_id = batch.id
    data_dir = config.resolved_data_dir()
    run_dir = data_dir / "runs" / run_id
    manifest_path = persist_batch(batch, deduped_events, scores, run_dir, duplicates)
    write_json_atomic(
        data_dir / LATEST_POINTER,
        {"run_id": run_id, "manifest": f"runs/{run_id}/manifest.json"},
    )
    timings["persist"] = time.perf_counter() - t0

    counts = {
        "ingested": len(batch.articles),
        "events": len(deduped_events),
        "members": sum(len(e.member_ids) for e in deduped_events),
        "duplicates": n_duplicates,
        "scored": len(scores),
        "noise": len(noise_ids),
    }
    assert counts["ingested"] == counts["members"] + counts["duplicates"] + counts["noise"]
    logger.info("run %s: %s", run_id, counts)
    return PipelineRun(
        run_id=run_id,
        window_start=batch.window_start,
        window_end=batch.window_end,
        counts=counts,
        timings=timings,
        config_fingerprint=config.fingerprint(),
        manifest_path=manifest_path,
    )
