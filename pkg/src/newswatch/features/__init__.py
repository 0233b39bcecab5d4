"""Sparse feature extraction: n-grams, lexicons, style/richness/readability, NELA."""

from .tokenizer import Tokenization, tokenize
from .vectorizer import WORD_NGRAM_1_3, CHAR_NGRAM_3, Vectorizer, fit_vectorizer, transform
from .lexicon import Lexicon, builtin_lexicons, lexicon_features, load_lexicon
from .stylometry import (
    ReadabilityFeatures,
    RichnessFeatures,
    count_syllables,
    readability,
    richness,
)
from .nela import NELA_FEATURE_NAMES, NelaLexicons, nela_subset
from .pipeline import (
    ALL_FAMILIES,
    FeaturePipeline,
    FeatureVector,
    ScalerStats,
    assemble,
)

__all__ = [
    "Tokenization",
    "tokenize",
    "WORD_NGRAM_1_3",
    "CHAR_NGRAM_3",
    "Vectorizer",
    "fit_vectorizer",
    "transform",
    "Lexicon",
    "builtin_lexicons",
    "lexicon_features",
    "load_lexicon",
    "RichnessFeatures",
    "ReadabilityFeatures",
    "count_syllables",
    "richness",
    "readability",
    "NELA_FEATURE_NAMES",
    "NelaLexicons",
    "nela_subset",
    "ALL_FAMILIES",
    "FeaturePipeline",
    "FeatureVector",
    "ScalerStats",
    "assemble",
]
