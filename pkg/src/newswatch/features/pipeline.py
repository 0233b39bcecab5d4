"""Assemble the four feature families into one sparse vector.

Fixed block order: word n-grams, lexicons, style (char 3-grams followed by
the five richness and three readability scalars), then the NELA subset.
Disabled families contribute empty spans.  Dense scalar features (lexicon,
richness, readability, NELA) are standardized with training-set mean/stdev;
the sparse tf.idf blocks are already per-family L2-normalized.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lexicon import Lexicon, lexicon_features
from .nela import NELA_FEATURE_NAMES, NelaLexicons, nela_subset
from .stylometry import readability, richness
from .tokenizer import tokenize
from .vectorizer import CHAR_NGRAM_3, WORD_NGRAM_1_3, Vectorizer, fit_vectorizer, transform

ALL_FAMILIES = ("ngrams", "lexicon", "style", "nela")

_N_RICHNESS = 5
_N_READABILITY = 3
_N_NELA = len(NELA_FEATURE_NAMES)


@dataclass(frozen=True)
class FeatureVector:
    indices: np.ndarray  # strictly increasing column ids
    values: np.ndarray  # finite reals
    width: int
    family_spans: dict[str, tuple[int, int]]  # disjoint contiguous ranges


@dataclass(frozen=True)
class ScalerStats:
    """Training-set mean/stdev for the dense scalar columns, in layout order."""

    mean: np.ndarray
    std: np.ndarray  # zero-variance columns stored as 1.0

    def apply(self, scalars: np.ndarray) -> np.ndarray:
        return (scalars - self.mean) / self.std


def _scalar_features(
    text: str, lexicons: list[Lexicon], flags: set[str], nela_lexicons: NelaLexicons
) -> np.ndarray:
    """Dense scalars for the enabled families, in layout order."""
    tokenization = tokenize(text)
    parts: list[float] = []
    if "lexicon" in flags:
        parts.extend(lexicon_features(tokenization, lexicons))
    if "style" in flags:
        rich = richness(tokenization)
        parts.extend([rich.ttr, float(rich.v1), float(rich.v2), rich.honore_r, rich.yule_k])
        read = readability(text)
        parts.extend([read.fk_grade, read.flesch_ease, read.gunning_fog])
    if "nela" in flags:
        parts.extend(nela_subset(text, tokenization, nela_lexicons))
    return np.array(parts, dtype=np.float64)


def _spans(
    word_vec: Vectorizer | None,
    char_vec: Vectorizer | None,
    n_lexicons: int,
    flags: set[str],
) -> dict[str, tuple[int, int]]:
    widths = {
        "ngrams": word_vec.width if "ngrams" in flags and word_vec else 0,
        "lexicon": n_lexicons if "lexicon" in flags else 0,
        "style": (char_vec.width if char_vec else 0) + _N_RICHNESS + _N_READABILITY
        if "style" in flags
        else 0,
        "nela": _N_NELA if "nela" in flags else 0,
    }
    spans: dict[str, tuple[int, int]] = {}
    offset = 0
    for family in ALL_FAMILIES:
        spans[family] = (offset, offset + widths[family])
        offset += widths[family]
    return spans


def assemble(
    text: str,
    vectorizers: dict[str, Vectorizer | None],
    lexicons: list[Lexicon],
    flags: set[str],
    scaler: ScalerStats | None = None,
    nela_lexicons: NelaLexicons | None = None,
) -> FeatureVector:
    """Concatenate the enabled family blocks for one document.

    ``vectorizers`` holds the fitted "word" and "char" vectorizers; enabling
    ngrams or style without the matching fitted vectorizer is fatal.
    """
    unknown = flags - set(ALL_FAMILIES)
    if unknown:
        raise ValueError(f"unknown feature families: {sorted(unknown)}")
    word_vec = vectorizers.get("word")
    char_vec = vectorizers.get("char")
    if "ngrams" in flags and word_vec is None:
        raise ValueError("ngrams family enabled but no fitted word vectorizer")
    if "style" in flags and char_vec is None:
        raise ValueError("style family enabled but no fitted char vectorizer")

    spans = _spans(word_vec, char_vec, len(lexicons), flags)
    entries: dict[int, float] = {}

    if "ngrams" in flags:
        base = spans["ngrams"][0]
        for col, value in transform(word_vec, text).items():
            entries[base + col] = value
    if "style" in flags:
        base = spans["style"][0]
        for col, value in transform(char_vec, text).items():
            entries[base + col] = value

    scalars = _scalar_features(text, lexicons, flags, nela_lexicons or NelaLexicons())
    if scaler is not None:
        if len(scaler.mean) != len(scalars):
            raise ValueError(
                f"scaler width {len(scaler.mean)} does not match scalar count {len(scalars)}"
            )
        scalars = scaler.apply(scalars)

    scalar_cols: list[int] = []
    if "lexicon" in flags:
        scalar_cols.extend(range(spans["lexicon"][0], spans["lexicon"][1]))
    if "style" in flags:
        start = spans["style"][0] + (char_vec.width if char_vec else 0)
        scalar_cols.extend(range(start, spans["style"][1]))
    if "nela" in flags:
        scalar_cols.extend(range(spans["nela"][0], spans["nela"][1]))
    for col, value in zip(scalar_cols, scalars):
        entries[col] = float(value)

    indices = np.array(sorted(entries), dtype=np.int64)
    values = np.array([entries[i] for i in indices], dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise ValueError("non-finite feature value")
    width = spans["nela"][1]
    return FeatureVector(indices=indices, values=values, width=width, family_spans=spans)


@dataclass
class FeaturePipeline:
    """Fitted featurization state: vectorizers, lexicons, flags, scaler."""

    flags: set[str] = field(default_factory=lambda: set(ALL_FAMILIES))
    lexicons: list[Lexicon] = field(default_factory=list)
    nela_lexicons: NelaLexicons = field(default_factory=NelaLexicons)
    min_df: int = 2
    word_vectorizer: Vectorizer | None = None
    char_vectorizer: Vectorizer | None = None
    scaler: ScalerStats | None = None

    def fit(self, corpus: list[str]) -> "FeaturePipeline":
        if not corpus:
            raise ValueError("cannot fit feature pipeline on an empty corpus")
        if "ngrams" in self.flags:
            self.word_vectorizer = fit_vectorizer(corpus, WORD_NGRAM_1_3, self.min_df)
        if "style" in self.flags:
            self.char_vectorizer = fit_vectorizer(corpus, CHAR_NGRAM_3, self.min_df)
        scalar_rows = np.array(
            [_scalar_features(doc, self.lexicons, self.flags, self.nela_lexicons) for doc in corpus]
        )
        if scalar_rows.size:
            mean = scalar_rows.mean(axis=0)
            std = scalar_rows.std(axis=0)
            std[std == 0.0] = 1.0
            self.scaler = ScalerStats(mean=mean, std=std)
        else:
            self.scaler = ScalerStats(mean=np.zeros(0), std=np.ones(0))
        return self

    @property
    def vectorizers(self) -> dict[str, Vectorizer | None]:
        return {"word": self.word_vectorizer, "char": self.char_vectorizer}

    @property
    def width(self) -> int:
        spans = _spans(self.word_vectorizer, self.char_vectorizer, len(self.lexicons), self.flags)
        return spans["nela"][1]

    @property
    def family_spans(self) -> dict[str, tuple[int, int]]:
        return _spans(self.word_vectorizer, self.char_vectorizer, len(self.lexicons), self.flags)

    def assemble(self, text: str) -> FeatureVector:
        return assemble(
            text,
            self.vectorizers,
            self.lexicons,
            self.flags,
            scaler=self.scaler,
            nela_lexicons=self.nela_lexicons,
        )
