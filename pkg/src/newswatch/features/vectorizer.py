"""tf.idf vectorizers for word [1,3]-grams and character 3-grams.

idf(t) = ln((1 + N) / (1 + df(t))) + 1, tf is the raw in-document count,
and nonzero family vectors are L2-normalized.  Vocabulary order is
lexicographic, so refitting the same corpus is byte-for-byte reproducible.
"""
from __future__ import annotations

import hashlib
import math
import re
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .tokenizer import tokenize

WORD_NGRAM_1_3 = "word_ngram_1_3"
CHAR_NGRAM_3 = "char_ngram_3"

_WS_RE = re.compile(r"\s+")


@dataclass(frozen=True)
class Vectorizer:
    kind: str
    vocabulary: dict[str, int]  # term -> column, bijection onto [0, |vocab|)
    idf: np.ndarray  # per-column, finite, >= 0
    fitted_on: str  # corpus fingerprint
    min_df: int

    @property
    def width(self) -> int:
        return len(self.vocabulary)


def _word_terms(text: str) -> list[str]:
    tokens = tokenize(text).tokens
    terms: list[str] = list(tokens)
    for n in (2, 3):
        terms.extend(" ".join(tokens[i : i + n]) for i in range(len(tokens) - n + 1))
    return terms


def _char_terms(text: str) -> list[str]:
    # whitespace runs collapse to one space so line breaks and spaces count alike
    normalized = _WS_RE.sub(" ", text.lower()).strip()
    return [normalized[i : i + 3] for i in range(len(normalized) - 2)]


_TERM_FNS = {WORD_NGRAM_1_3: _word_terms, CHAR_NGRAM_3: _char_terms}


def extract_terms(text: str, kind: str) -> list[str]:
    try:
        return _TERM_FNS[kind](text)
    except KeyError:
        raise ValueError(f"unknown vectorizer kind: {kind!r}") from None


def corpus_fingerprint(corpus: list[str], kind: str, min_df: int) -> str:
    h = hashlib.sha256(f"{kind}:{min_df}:{len(corpus)}".encode("utf-8"))
    for doc in corpus:
        h.update(hashlib.sha256(doc.encode("utf-8")).digest())
    return h.hexdigest()[:16]


def fit_vectorizer(corpus: list[str], kind: str, min_df: int = 2) -> Vectorizer:
    """Fit vocabulary and idf on a corpus; terms below min_df are dropped."""
    if not corpus:
        raise ValueError("cannot fit a vectorizer on an empty corpus")
    df: Counter[str] = Counter()
    for doc in corpus:
        df.update(set(extract_terms(doc, kind)))
    vocab_terms = sorted(t for t, c in df.items() if c >= min_df)
    n_docs = len(corpus)
    idf = np.array(
        [math.log((1 + n_docs) / (1 + df[t])) + 1.0 for t in vocab_terms], dtype=np.float64
    )
    return Vectorizer(
        kind=kind,
        vocabulary={t: i for i, t in enumerate(vocab_terms)},
        idf=idf,
        fitted_on=corpus_fingerprint(corpus, kind, min_df),
        min_df=min_df,
    )


def transform(vectorizer: Vectorizer, text: str) -> dict[int, float]:
    """Sparse tf.idf family vector (column -> value), L2-normalized when nonzero.

    Out-of-vocabulary terms are ignored; the fitted state is never mutated.
    """
    counts = Counter(extract_terms(text, vectorizer.kind))
    entries: dict[int, float] = {}
    for term, tf in counts.items():
        col = vectorizer.vocabulary.get(term)
        if col is not None:
            entries[col] = tf * float(vectorizer.idf[col])
    if entries:
        norm = math.sqrt(sum(v * v for v in entries.values()))
        entries = {c: v / norm for c, v in entries.items()}
    return entries
