"""Parser-free subset of content-based news-credibility features.

Fifteen fixed-order features per document.  Punctuation-mark features are
raw counts; word-class features are ratios over max(1, token count), as
documented per feature below.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from .tokenizer import Tokenization

NELA_FEATURE_NAMES = (
    "exclamations",  # raw count of '!'
    "questions",  # raw count of '?'
    "quotes",  # raw count of double-quote marks
    "allcaps_ratio",  # all-caps words (len >= 2) / raw word count
    "avg_word_len",  # mean token length in characters
    "log_token_count",  # ln(1 + N)
    "negation_ratio",  # negation-lexicon tokens / N
    "first_person_ratio",
    "second_person_ratio",
    "third_person_ratio",
    "swear_ratio",  # swear-lexicon tokens / N
    "number_ratio",  # all-digit tokens / N
    "punct_per_sentence",  # .,;:!? characters / sentence count
    "avg_sentence_len",  # N / sentence count
    "stopword_ratio",
)

FIRST_PERSON = frozenset("i me my mine myself we us our ours ourselves".split())
SECOND_PERSON = frozenset("you your yours yourself yourselves".split())
THIRD_PERSON = frozenset(
    "he him his himself she her hers herself it its itself they them their theirs themselves".split()
)

_RAW_WORD_RE = re.compile(r"\w+", re.UNICODE)
_QUOTE_CHARS = '"“”«»'
_PUNCT_CHARS = ".,;:!?"


def _load_list(filename: str) -> frozenset[str]:
    text = resources.files("newswatch").joinpath(f"data/{filename}").read_text("utf-8")
    return frozenset(
        line.strip().lower()
        for line in text.splitlines()
        if line.strip() and not line.startswith("#")
    )


@lru_cache(maxsize=None)
def _default_negations() -> frozenset[str]:
    return _load_list("negations.txt")


@lru_cache(maxsize=None)
def _default_swears() -> frozenset[str]:
    return _load_list("swear.txt")


@lru_cache(maxsize=None)
def _default_stopwords() -> frozenset[str]:
    return _load_list("stopwords_en.txt")


@dataclass(frozen=True)
class NelaLexicons:
    negations: frozenset[str] = field(default_factory=_default_negations)
    swears: frozenset[str] = field(default_factory=_default_swears)
    stopwords: frozenset[str] = field(default_factory=_default_stopwords)


def nela_subset(
    text: str, tokenization: Tokenization, lexicons: NelaLexicons | None = None
) -> list[float]:
    """Fixed-order feature vector; empty text yields all zeros."""
    lex = lexicons or NelaLexicons()
    tokens = tokenization.tokens
    n = len(tokens)
    denom = max(1, n)
    n_sentences = max(1, len(tokenization.sentences))

    raw_words = _RAW_WORD_RE.findall(text)
    allcaps = sum(1 for w in raw_words if len(w) >= 2 and w.isalpha() and w.isupper())

    def ratio(wordset: frozenset[str]) -> float:
        return sum(1 for t in tokens if t in wordset) / denom

    return [
        float(text.count("!")),
        float(text.count("?")),
        float(sum(text.count(ch) for ch in _QUOTE_CHARS)),
        allcaps / max(1, len(raw_words)),
        sum(len(t) for t in tokens) / denom,
        math.log(1 + n),
        ratio(lex.negations),
        ratio(FIRST_PERSON),
        ratio(SECOND_PERSON),
        ratio(THIRD_PERSON),
        ratio(lex.swears),
        sum(1 for t in tokens if t.isdigit()) / denom,
        sum(text.count(ch) for ch in _PUNCT_CHARS) / n_sentences,
        n / n_sentences if n else 0.0,
        ratio(lex.stopwords),
    ]
