from __future__ import annotations

from datetime import datetime, timedelta, timezone

import pytest

from newswatch.config import AppConfig
from newswatch.corpus import PROPAGANDA, Article, article_id
from newswatch.features.lexicon import builtin_lexicons
from newswatch.features.pipeline import FeaturePipeline
from newswatch.model import save_model, train
from newswatch.synthetic import planted_corpus

WINDOW_END = datetime(2024, 5, 2, 0, 0, 0, tzinfo=timezone.utc)

# two stories; articles 0 and 1 are near-duplicates of each other
FIXTURE_TEXTS = [
    "The city council approved the new water treatment budget on Monday. "
    "Officials said the twelve million dollar project will start in March.",
    "The city council approved the new water treatment budget on Tuesday. "
    "Officials said the twelve million dollar project will start in March.",
    "Council members voted to approve a water treatment budget worth twelve "
    "million dollars. The project starts in March, city officials said.",
    "Researchers at the national university published a study on migratory birds. "
    "The study tracked thousands of birds across three continents using tiny solar tags.",
    "A new university study tracked migratory birds with solar tags across three "
    "continents, researchers said.",
    "The national university study of migratory birds used tiny solar tags to "
    "follow thousands of birds.",
]


def make_article(
    text: str,
    url: str,
    hours_before_window_end: float = 2.0,
    title: str = "",
    source_id: str = "src-1",
    window_end: datetime = WINDOW_END,
) -> Article:
    published = window_end - timedelta(hours=hours_before_window_end)
    return Article(
        id=article_id(url, published),
        url=url,
        source_id=source_id,
        title=title or text.split(".")[0][:60],
        text=text,
        published_at=published,
        fetched_at=published,
    )


@pytest.fixture()
def fixture_articles() -> list[Article]:
    return [
        make_article(text, f"https://example.org/a{i}", hours_before_window_end=2.0 + i)
        for i, text in enumerate(FIXTURE_TEXTS)
    ]


@pytest.fixture(scope="session")
def small_model_pipeline():
    """A small trained model + pipeline shared across service tests."""
    docs = planted_corpus(n_docs=240, seed=11)
    texts = [d.text for d in docs]
    labels = [1 if d.label == PROPAGANDA else 0 for d in docs]
    pipeline = FeaturePipeline(flags={"ngrams", "lexicon", "style", "nela"},
                               lexicons=builtin_lexicons(), min_df=2).fit(texts)
    features = [pipeline.assemble(t) for t in texts]
    model = train(features, labels, l2_lambda=1.0, pipeline=pipeline, max_iter=300)
    return model


@pytest.fixture(scope="session")
def small_model_path(small_model_pipeline, tmp_path_factory):
    path = tmp_path_factory.mktemp("model") / "small.nwm"
    save_model(small_model_pipeline, path)
    return path


@pytest.fixture()
def app_config(tmp_path) -> AppConfig:
    from newswatch.config import config_from_dict

    return config_from_dict({"service": {"data_dir": str(tmp_path / "store")}})
