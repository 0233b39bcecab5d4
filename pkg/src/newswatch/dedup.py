"""Near-duplicate detection inside an event via word n-gram overlap.

Articles are near-duplicates when the Jaccard coefficient of their shingle
sets reaches the threshold.  The relation is made transitive through
connected components, and each duplicate group keeps its earliest article.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .corpus import Article

_WORD_RE = re.compile(r"\w+", re.UNICODE)


@lru_cache(maxsize=None)
def default_stopwords() -> frozenset[str]:
    text = resources.files("newswatch").joinpath("data/stopwords_en.txt").read_text("utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip() and not w.startswith("#"))


def load_stopwords(path: str | Path) -> frozenset[str]:
    words = Path(path).read_text(encoding="utf-8").splitlines()
    return frozenset(w.strip().lower() for w in words if w.strip() and not w.startswith("#"))


@dataclass(frozen=True)
class DedupConfig:
    n: int = 3
    theta: float = 0.5
    stopwords: frozenset[str] = field(default_factory=default_stopwords)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n-gram order must be >= 1")
        if not (0.0 < self.theta <= 1.0):
            raise ValueError("theta must be in (0, 1]")


def shingles(text: str, config: DedupConfig) -> set[tuple[str, ...]]:
    """Set of contiguous n-token sequences after case-folding, tokenization
    and stopword removal.  Texts shorter than n surviving tokens yield the
    empty set."""
    tokens = [t for t in _WORD_RE.findall(text.lower()) if t not in config.stopwords]
    n = config.n
    if len(tokens) < n:
        return set()
    return {tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)}


def jaccard(a: set, b: set) -> float:
    """|a & b| / |a | b|; both empty is defined as 0.0."""
    if not a and not b:
        return 0.0
    return len(a & b) / len(a | b)


def dedup_event(
    articles: list[Article], config: DedupConfig
) -> tuple[list[Article], list[frozenset[str]]]:
    """Collapse near-duplicate groups to one representative each.

    Returns the kept articles in original order plus the duplicate groups
    (id sets of size >= 2).  Within a group the article with the earliest
    published_at is kept, ties broken by lexicographically smallest id.
    """
    n = len(articles)
    shingle_sets = [shingles(a.text, config) for a in articles]

    # connected components over the "jaccard >= theta" graph
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int) -> None:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)

    for i in range(n):
        for j in range(i + 1, n):
            if jaccard(shingle_sets[i], shingle_sets[j]) >= config.theta:
                union(i, j)

    components: dict[int, list[int]] = {}
    for i in range(n):
        components.setdefault(find(i), []).append(i)

    dup_groups: list[frozenset[str]] = []
    drop: set[int] = set()
    for root in sorted(components):
        members = components[root]
        if len(members) < 2:
            continue
        keep = min(members, key=lambda i: (articles[i].published_at, articles[i].id))
        drop.update(i for i in members if i != keep)
        dup_groups.append(frozenset(articles[i].id for i in members))
    kept = [a for i, a in enumerate(articles) if i not in drop]
    return kept, dup_groups
