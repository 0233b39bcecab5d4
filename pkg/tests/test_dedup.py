from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from newswatch.dedup import DedupConfig, dedup_event, default_stopwords, jaccard, shingles

from conftest import make_article

NO_STOPWORDS = frozenset()


class TestShingles:
    def test_hand_enumerated_trigrams(self):
        config = DedupConfig(n=3, stopwords=NO_STOPWORDS)
        expected = {
            ("the", "cat", "sat"),
            ("cat", "sat", "on"),
            ("sat", "on", "the"),
            ("on", "the", "mat"),
        }
        assert shingles("the cat sat on the mat", config) == expected

    def test_short_text_empty_set(self):
        config = DedupConfig(n=3, stopwords=NO_STOPWORDS)
        assert shingles("two words", config) == set()

    def test_case_folding(self):
        config = DedupConfig(n=3, stopwords=NO_STOPWORDS)
        assert shingles("The CAT sat", config) == shingles("the cat sat", config)

    def test_stopword_removal(self):
        config = DedupConfig(n=2, stopwords=frozenset({"the", "on"}))
        assert shingles("the cat sat on the mat", config) == {
            ("cat", "sat"),
            ("sat", "mat"),
        }

    def test_default_stopwords_loaded(self):
        words = default_stopwords()
        assert "the" in words and "and" in words and len(words) > 100


class TestJaccard:
    def test_equal_nonempty(self):
        assert jaccard({1, 2}, {1, 2}) == 1.0

    def test_both_empty_defined_zero(self):
        assert jaccard(set(), set()) == 0.0

    def test_hand_computed_three_fifths(self):
        config = DedupConfig(n=3, stopwords=NO_STOPWORDS)
        a = shingles("the cat sat on the mat", config)
        b = shingles("the cat sat on the rug", config)
        assert a & b == {("the", "cat", "sat"), ("cat", "sat", "on"), ("sat", "on", "the")}
        assert len(a | b) == 5
        assert jaccard(a, b) == 0.6

    @given(st.sets(st.integers(0, 50)), st.sets(st.integers(0, 50)))
    @settings(max_examples=100, deadline=None)
    def test_symmetry_and_range(self, a, b):
        value = jaccard(a, b)
        assert 0.0 <= value <= 1.0
        assert value == jaccard(b, a)


def _articles(texts, hours=None):
    hours = hours or [1.0 + i for i in range(len(texts))]
    return [
        make_article(t, f"https://x.org/{i}", hours_before_window_end=hours[i])
        for i, t in enumerate(texts)
    ]


class TestDedupEvent:
    def test_no_pair_above_threshold(self):
        articles = _articles(
            ["storm hits the coast hard today", "stocks rallied on earnings news again"]
        )
        kept, groups = dedup_event(articles, DedupConfig(stopwords=NO_STOPWORDS))
        assert kept == articles
        assert groups == []

    def test_byte_identical_pair_keeps_earlier(self):
        text = "breaking news about the harbor bridge closure this morning"
        articles = _articles([text, text], hours=[1.0, 5.0])  # second is older
        kept, groups = dedup_event(articles, DedupConfig(stopwords=NO_STOPWORDS))
        assert len(kept) == 1
        assert kept[0] is articles[1]  # earliest published_at wins
        assert groups == [frozenset(a.id for a in articles)]

    def test_tie_breaks_by_smallest_id(self):
        text = "breaking news about the harbor bridge closure this morning"
        articles = _articles([text, text], hours=[2.0, 2.0])
        kept, _ = dedup_event(articles, DedupConfig(stopwords=NO_STOPWORDS))
        assert kept[0].id == min(a.id for a in articles)

    def test_transitive_chain_single_group(self):
        # A~B and B~C high overlap, A~C low: connected components merge all three
        base = [f"w{i}" for i in range(12)]
        text_a = " ".join(base)
        text_b = " ".join(base[2:] + ["x1", "x2"])
        text_c = " ".join(base[4:] + ["x1", "x2", "y1", "y2"])
        config = DedupConfig(n=3, theta=0.5, stopwords=NO_STOPWORDS)
        sa, sb, sc = (shingles(t, config) for t in (text_a, text_b, text_c))
        # fixture precondition: a chain, not a triangle
        assert jaccard(sa, sb) >= 0.5
        assert jaccard(sb, sc) >= 0.5
        assert jaccard(sa, sc) < 0.5
        articles = _articles([text_a, text_b, text_c])
        kept, groups = dedup_event(articles, config)
        assert len(groups) == 1
        assert groups[0] == frozenset(a.id for a in articles)
        assert len(kept) == 1

    def test_idempotent(self):
        texts = [
            "city approves water budget for the spring construction season",
            "city approves water budget for the spring construction season today",
            "completely different story about a chess tournament final",
        ]
        articles = _articles(texts)
        config = DedupConfig(stopwords=NO_STOPWORDS)
        kept, _ = dedup_event(articles, config)
        again, groups = dedup_event(kept, config)
        assert again == kept
        assert groups == []

    def test_accounting_identity_random(self):
        rng = np.random.default_rng(31)
        vocab = [f"tok{i}" for i in range(30)]
        config = DedupConfig(stopwords=NO_STOPWORDS)
        for _ in range(50):
            texts = [
                " ".join(rng.choice(vocab, size=rng.integers(3, 15)))
                for _ in range(rng.integers(1, 8))
            ]
            articles = _articles(texts)
            kept, groups = dedup_event(articles, config)
            assert len(kept) + sum(len(g) - 1 for g in groups) == len(articles)

    def test_representative_is_order_invariant(self):
        text = "harbor bridge closure traffic chaos expected all week long"
        articles = _articles([text, text + " extra", text + " extra words"], hours=[3, 1, 2])
        config = DedupConfig(theta=0.3, stopwords=NO_STOPWORDS)
        kept_a, _ = dedup_event(articles, config)
        kept_b, _ = dedup_event(articles[::-1], config)
        assert {a.id for a in kept_a} == {a.id for a in kept_b}

    def test_config_validation(self):
        with pytest.raises(ValueError):
            DedupConfig(n=0)
        with pytest.raises(ValueError):
            DedupConfig(theta=0.0)
        with pytest.raises(ValueError):
            DedupConfig(theta=1.5)
