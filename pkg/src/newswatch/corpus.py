"""Article domain types, ingestion from files/URLs, time windows, and persistence.

Article JSONL format: one object per line with keys
``id?, url, source_id, title, text, published_at, fetched_at?``
(ISO-8601 timestamps, UTC).  TSV article files carry the same columns
with a header row.  Labeled training corpora use ``label<TAB>text`` with
labels 0 = non_propaganda, 1 = propaganda.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import re
import sys
import urllib.request
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from html.parser import HTMLParser
from pathlib import Path
from typing import Iterable, Mapping, Sequence

logger = logging.getLogger(__name__)

PROPAGANDA = "propaganda"
NON_PROPAGANDA = "non_propaganda"

ARTICLE_FIELDS = ("id", "url", "source_id", "title", "text", "published_at", "fetched_at")
_REQUIRED_FIELDS = ("url", "source_id", "title", "text", "published_at")


class CorpusError(Exception):
    """Fatal ingestion or persistence failure."""


@dataclass(frozen=True)
class Article:
    """One retrieved news item."""

    id: str
    url: str
    source_id: str
    title: str
    text: str
    published_at: datetime
    fetched_at: datetime


@dataclass(frozen=True)
class Source:
    id: str
    name: str
    feed_url: str | None = None
    train_label: str | None = None  # PROPAGANDA / NON_PROPAGANDA


@dataclass(frozen=True)
class LabeledDoc:
    text: str
    label: str  # PROPAGANDA / NON_PROPAGANDA


@dataclass(frozen=True)
class Batch:
    """Articles whose published_at falls in [window_start, window_end)."""

    window_start: datetime
    window_end: datetime
    articles: tuple[Article, ...]

    @property
    def id(self) -> str:
        return self.window_end.astimezone(timezone.utc).strftime("b%Y%m%dT%H%M%SZ")


def article_id(url: str, published_at: datetime) -> str:
    """Stable opaque id, deterministic given (url, published_at)."""
    stamp = format_timestamp(published_at)
    digest = hashlib.sha256(f"{url}\n{stamp}".encode("utf-8")).hexdigest()
    return digest[:16]


def parse_timestamp(value: str) -> datetime:
    """Parse an ISO-8601 timestamp; naive values are taken as UTC."""
    raw = value.strip()
    if raw.endswith(("Z", "z")):
        raw = raw[:-1] + "+00:00"
    dt = datetime.fromisoformat(raw)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def format_timestamp(dt: datetime) -> str:
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def normalize_whitespace(text: str) -> str:
    return re.sub(r"\s+", " ", text).strip()


def _article_from_record(record: Mapping[str, object]) -> Article:
    missing = [k for k in _REQUIRED_FIELDS if not str(record.get(k) or "").strip()]
    if missing:
        raise ValueError(f"missing required field(s): {', '.join(missing)}")
    text = str(record["text"])
    if not normalize_whitespace(text):
        raise ValueError("text empty after whitespace normalization")
    published_at = parse_timestamp(str(record["published_at"]))
    fetched_raw = str(record.get("fetched_at") or "").strip()
    # fetched_at defaults to published_at so that reruns stay deterministic
    fetched_at = parse_timestamp(fetched_raw) if fetched_raw else published_at
    url = str(record["url"])
    aid = str(record.get("id") or "").strip() or article_id(url, published_at)
    return Article(
        id=aid,
        url=url,
        source_id=str(record["source_id"]),
        title=str(record["title"]),
        text=text,
        published_at=published_at,
        fetched_at=fetched_at,
    )


def load_articles(path: str | Path, format: str = "jsonl") -> list[Article]:
    """Load articles from a JSONL or TSV file, skipping invalid records.

    Invalid records are reported with their line number via the module
    logger and skipped; an unreadable file is fatal.  Order is preserved.
    """
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read article file {path}: {exc}") from exc

    articles: list[Article] = []
    if format == "jsonl":
        for lineno, line in enumerate(raw.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                if not isinstance(record, dict):
                    raise ValueError("line is not a JSON object")
                articles.append(_article_from_record(record))
            except (ValueError, KeyError) as exc:
                logger.warning("%s line %d: skipped invalid article (%s)", path, lineno, exc)
    elif format == "tsv":
        reader = csv.DictReader(io.StringIO(raw), delimiter="\t")
        for lineno, record in enumerate(reader, start=2):  # line 1 is the header
            try:
                articles.append(_article_from_record(record))
            except (ValueError, KeyError) as exc:
                logger.warning("%s line %d: skipped invalid article (%s)", path, lineno, exc)
    else:
        raise CorpusError(f"unknown article format: {format!r}")
    return articles


def save_articles(articles: Iterable[Article], path: str | Path) -> None:
    """Write articles as JSONL; load_articles round-trips every field."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for a in articles:
            record = {
                "id": a.id,
                "url": a.url,
                "source_id": a.source_id,
                "title": a.title,
                "text": a.text,
                "published_at": format_timestamp(a.published_at),
                "fetched_at": format_timestamp(a.fetched_at),
            }
            fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")


def load_labeled_docs(path: str | Path) -> list[LabeledDoc]:
    """Load a ``label<TAB>text`` corpus; labels 0/1 (or the label names)."""
    path = Path(path)
    label_map = {
        "0": NON_PROPAGANDA,
        "1": PROPAGANDA,
        NON_PROPAGANDA: NON_PROPAGANDA,
        PROPAGANDA: PROPAGANDA,
    }
    docs: list[LabeledDoc] = []
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise CorpusError(f"cannot read labeled corpus {path}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        label_raw, sep, text = line.partition("\t")
        if not sep or label_raw.strip() not in label_map:
            logger.warning("%s line %d: skipped invalid labeled line", path, lineno)
            continue
        docs.append(LabeledDoc(text=text, label=label_map[label_raw.strip()]))
    return docs


def load_source_manifest(path: str | Path) -> list[Source]:
    """Load sources from a JSON list; ids must be unique."""
    records = json.loads(Path(path).read_text(encoding="utf-8"))
    sources = [
        Source(
            id=str(r["id"]),
            name=str(r.get("name", r["id"])),
            feed_url=r.get("feed_url"),
            train_label=r.get("train_label"),
        )
        for r in records
    ]
    seen: set[str] = set()
    for s in sources:
        if s.id in seen:
            raise CorpusError(f"duplicate source id in manifest: {s.id}")
        seen.add(s.id)
    return sources


def select_window(articles: Iterable[Article], window_end: datetime, period: timedelta) -> Batch:
    """Batch of articles with published_at in the half-open window
    [window_end - period, window_end); duplicate ids collapse to the first
    occurrence."""
    if period <= timedelta(0):
        raise ValueError("period must be positive")
    if window_end.tzinfo is None:
        window_end = window_end.replace(tzinfo=timezone.utc)
    window_start = window_end - period
    seen: set[str] = set()
    selected: list[Article] = []
    for a in articles:
        if window_start <= a.published_at < window_end and a.id not in seen:
            seen.add(a.id)
            selected.append(a)
    return Batch(window_start=window_start, window_end=window_end, articles=tuple(selected))


# ---------------------------------------------------------------------------
# Deterministic JSON persistence
# ---------------------------------------------------------------------------

def render_json(obj: object, indent: int = 2) -> str:
    """Serialize to JSON with sorted keys and floats fixed at 6 decimals.

    Identical inputs always produce identical bytes, which is what makes
    batch reruns overwrite with byte-identical output.
    """
    out: list[str] = []
    _render(obj, out, indent, 0)
    return "".join(out)


def _render(obj: object, out: list[str], indent: int, level: int) -> None:
    pad = " " * (indent * (level + 1))
    closing_pad = " " * (indent * level)
    if obj is None or isinstance(obj, bool):
        out.append(json.dumps(obj))
    elif isinstance(obj, float):
        if obj != obj or obj in (float("inf"), float("-inf")):
            raise ValueError("non-finite float is not representable in persisted JSON")
        out.append(f"{obj:.6f}")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, Mapping):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        keys = sorted(obj)
        for i, key in enumerate(keys):
            if not isinstance(key, str):
                raise ValueError("persisted JSON keys must be strings")
            out.append(pad + json.dumps(key, ensure_ascii=False) + ": ")
            _render(obj[key], out, indent, level + 1)
            out.append(",\n" if i < len(keys) - 1 else "\n")
        out.append(closing_pad + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        out.append("[\n")
        for i, item in enumerate(obj):
            out.append(pad)
            _render(item, out, indent, level + 1)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(closing_pad + "]")
    else:
        raise ValueError(f"cannot persist object of type {type(obj).__name__}")


def write_json_atomic(path: Path, obj: object) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(render_json(obj) + "\n", encoding="utf-8")
    tmp.replace(path)


def _member_record(article: Article, score) -> dict:
    record = {
        "id": article.id,
        "url": article.url,
        "source_id": article.source_id,
        "title": article.title,
        "published_at": format_timestamp(article.published_at),
    }
    if score is not None:
        record["propaganda_index"] = float(score.propaganda_index)
        record["bin"] = int(score.bin)
    return record


def persist_batch(
    batch: Batch,
    events: Sequence,
    scores: Mapping[str, object] | None,
    out_dir: str | Path,
    duplicates: Mapping[str, Sequence[str]] | None = None,
) -> Path:
    """Write one JSON document per event plus a batch manifest.

    ``events`` need ``.id`` and ``.member_ids``; ``scores`` maps article id to
    an object with ``.propaganda_index`` and ``.bin``; ``duplicates`` maps
    event id to the near-duplicate article ids removed from it.  Articles in
    no event and no duplicate group are counted as noise.  Rerunning with
    identical inputs produces byte-identical files.
    """
    out_dir = Path(out_dir)
    scores = scores or {}
    duplicates = duplicates or {}
    try:
        events_dir = out_dir / "events"
        events_dir.mkdir(parents=True, exist_ok=True)

        by_id = {a.id: a for a in batch.articles}
        event_entries = []
        accounted: set[str] = set()
        n_members = 0
        n_duplicates = 0
        window = {
            "start": format_timestamp(batch.window_start),
            "end": format_timestamp(batch.window_end),
        }
        for event in events:
            removed = sorted(duplicates.get(event.id, ()))
            members = []
            for mid in event.member_ids:
                members.append(_member_record(by_id[mid], scores.get(mid)))
                accounted.add(mid)
            accounted.update(removed)
            # highest propaganda index first within an event
            members.sort(key=lambda m: (-m.get("propaganda_index", 0.0), m["id"]))
            doc = {
                "id": event.id,
                "window": window,
                "member_count": len(members),
                "members": members,
                "duplicates_removed": removed,
            }
            filename = f"{event.id}.json"
            write_json_atomic(events_dir / filename, doc)
            event_entries.append(
                {"id": event.id, "file": f"events/{filename}", "member_count": len(members)}
            )
            n_members += len(members)
            n_duplicates += len(removed)

        noise_ids = [a.id for a in batch.articles if a.id not in accounted]
        manifest = {
            "batch_id": batch.id,
            "window": window,
            "counts": {
                "articles": len(batch.articles),
                "events": len(events),
                "members": n_members,
                "duplicates": n_duplicates,
                "noise": len(noise_ids),
            },
            "events": event_entries,
            "noise_ids": noise_ids,
        }
        manifest_path = out_dir / "manifest.json"
        write_json_atomic(manifest_path, manifest)
        return manifest_path
    except OSError as exc:
        raise CorpusError(f"cannot persist batch under {out_dir}: {exc}") from exc


# ---------------------------------------------------------------------------
# Optional URL fetching with a plain-text fallback
# ---------------------------------------------------------------------------

class _TextExtractor(HTMLParser):
    """Strips tags; text inside script/style is dropped."""

    _SKIP = {"script", "style", "noscript"}
    _BREAKERS = {"p", "div", "br", "section", "article", "li", "h1", "h2", "h3", "h4"}

    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.blocks: list[str] = [""]
        self._skip_depth = 0

    def handle_starttag(self, tag, attrs):
        if tag in self._SKIP:
            self._skip_depth += 1
        elif tag in self._BREAKERS:
            self.blocks.append("")

    def handle_endtag(self, tag):
        if tag in self._SKIP and self._skip_depth:
            self._skip_depth -= 1
        elif tag in self._BREAKERS:
            self.blocks.append("")

    def handle_data(self, data):
        if not self._skip_depth:
            self.blocks[-1] += data


def extract_text(html: str) -> str:
    """Plain-text fallback: strip tags and keep the longest contiguous block."""
    parser = _TextExtractor()
    parser.feed(html)
    blocks = [normalize_whitespace(b) for b in parser.blocks]
    blocks = [b for b in blocks if b]
    if not blocks:
        return ""
    return max(blocks, key=len)


def fetch_article(
    url: str,
    source_id: str,
    title: str = "",
    raw_html_dir: str | Path | None = None,
    timeout: float = 20.0,
) -> Article:
    """Fetch a URL and build an Article from the extracted plain text.

    The raw HTML is stored under ``raw_html_dir`` when given.  published_at
    is the fetch time; feeds that know better should supply pre-extracted
    records instead.
    """
    with urllib.request.urlopen(url, timeout=timeout) as resp:
        html = resp.read().decode("utf-8", errors="replace")
    now = datetime.now(timezone.utc).replace(microsecond=0)
    if raw_html_dir is not None:
        raw_dir = Path(raw_html_dir)
        raw_dir.mkdir(parents=True, exist_ok=True)
        (raw_dir / (article_id(url, now) + ".html")).write_text(html, encoding="utf-8")
    text = extract_text(html)
    if not text:
        raise CorpusError(f"no text content extracted from {url}")
    return Article(
        id=article_id(url, now),
        url=url,
        source_id=source_id,
        title=title or url,
        text=text,
        published_at=now,
        fetched_at=now,
    )
