"""DBSCAN over article vectors; non-noise clusters become events.

The eps-neighborhood of a point always counts the point itself, so
min_members=2 means "has at least one neighbor within eps".  Scan order is
the input order, which makes border-point assignment deterministic: a
border point belongs to the first cluster whose expansion reaches it.
The full O(n^2) distance matrix is computed up front; batches are
daily-scale, so no spatial index.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .corpus import Batch
from .embedding import DocVector, distance_matrix, make_doc_vector

NOISE = -1
_UNVISITED = -2


@dataclass(frozen=True)
class ClusteringConfig:
    eps: float = 0.55
    min_members: int = 2

    def __post_init__(self) -> None:
        if self.eps <= 0:
            raise ValueError("eps must be > 0")
        if self.min_members < 2:
            raise ValueError("min_members must be >= 2")


@dataclass(frozen=True)
class Event:
    id: str
    member_ids: tuple[str, ...]
    centroid: DocVector


def dbscan_labels(dist: np.ndarray, config: ClusteringConfig) -> list[int]:
    """DBSCAN on a precomputed symmetric distance matrix.

    Returns one label per point: cluster id >= 0 in discovery order, or
    NOISE.  Core point iff its neighborhood (self included) has at least
    min_members points.
    """
    n = dist.shape[0]
    if dist.shape != (n, n):
        raise ValueError("distance matrix must be square")
    labels = [_UNVISITED] * n

    def neighborhood(i: int) -> np.ndarray:
        mask = dist[i] <= config.eps
        mask[i] = True
        return np.flatnonzero(mask)

    cluster_id = 0
    for i in range(n):
        if labels[i] != _UNVISITED:
            continue
        neigh = neighborhood(i)
        if len(neigh) < config.min_members:
            labels[i] = NOISE
            continue
        labels[i] = cluster_id
        seeds = deque(int(j) for j in neigh if j != i)
        while seeds:
            j = seeds.popleft()
            if labels[j] == NOISE:
                labels[j] = cluster_id  # border point claimed by first reach
            if labels[j] != _UNVISITED:
                continue
            labels[j] = cluster_id
            j_neigh = neighborhood(j)
            if len(j_neigh) >= config.min_members:
                seeds.extend(int(k) for k in j_neigh)
        cluster_id += 1
    return labels


def dbscan(points: list[DocVector], config: ClusteringConfig) -> list[int]:
    """DBSCAN over document vectors with the cosine distance."""
    if not points:
        return []
    return dbscan_labels(distance_matrix(points), config)


def build_events(
    batch: Batch, vectors: list[DocVector], config: ClusteringConfig
) -> tuple[list[Event], list[str]]:
    """One Event per non-noise cluster, plus the noise article ids.

    Event ids combine the batch id with the cluster ordinal and are stable
    across reruns on identical input.
    """
    if len(vectors) != len(batch.articles):
        raise ValueError(
            f"vector/article count mismatch: {len(vectors)} vs {len(batch.articles)}"
        )
    labels = dbscan(vectors, config)
    clusters: dict[int, list[int]] = {}
    noise_ids: list[str] = []
    for idx, label in enumerate(labels):
        if label == NOISE:
            noise_ids.append(batch.articles[idx].id)
        else:
            clusters.setdefault(label, []).append(idx)
    events = []
    for label in sorted(clusters):
        member_idx = clusters[label]
        centroid = make_doc_vector(np.mean([vectors[i].values for i in member_idx], axis=0))
        events.append(
            Event(
                id=f"{batch.id}-e{label}",
                member_ids=tuple(batch.articles[i].id for i in member_idx),
                centroid=centroid,
            )
        )
    return events, noise_ids
