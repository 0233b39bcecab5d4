"""Vocabulary-richness statistics and readability indices.

Richness follows the standard definitions: with N tokens, V types and V_i
types occurring exactly i times,

    ttr      = V / N
    honore_r = 100 * ln(N) / (1 - V1/V)      (denominator 1e-6 when V1 = V)
    yule_k   = 10^4 * (sum_i i^2 * V_i - N) / N^2

Readability uses W words, S sentences, Y syllables and C complex words
(>= 3 syllables):

    flesch_ease = 206.835 - 1.015*(W/S) - 84.6*(Y/W)
    fk_grade    = 0.39*(W/S) + 11.8*(Y/W) - 15.59
    gunning_fog = 0.4*(W/S + 100*C/W)

Syllables come from a versioned vowel-group heuristic: count maximal
vowel runs (aeiouy), drop a silent final 'e' when it forms its own run
and is not the only one, minimum 1.  Tokens without vowels count 1.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .tokenizer import Tokenization, tokenize

SYLLABLE_HEURISTIC_VERSION = 1

_VOWELS = frozenset("aeiouy")


@dataclass(frozen=True)
class RichnessFeatures:
    ttr: float
    v1: int  # hapax legomena
    v2: int  # dislegomena
    honore_r: float
    yule_k: float


@dataclass(frozen=True)
class ReadabilityFeatures:
    fk_grade: float
    flesch_ease: float
    gunning_fog: float


def richness(tokenization: Tokenization) -> RichnessFeatures:
    tokens = tokenization.tokens
    n = len(tokens)
    if n == 0:
        return RichnessFeatures(ttr=0.0, v1=0, v2=0, honore_r=0.0, yule_k=0.0)
    freqs = Counter(tokens)
    v = len(freqs)
    spectrum = Counter(freqs.values())  # occurrence count -> number of types
    v1 = spectrum.get(1, 0)
    v2 = spectrum.get(2, 0)
    denom = 1.0 - v1 / v
    if v1 == v:
        denom = 1e-6
    honore_r = 100.0 * math.log(n) / denom
    yule_k = 1e4 * (sum(i * i * vi for i, vi in spectrum.items()) - n) / (n * n)
    return RichnessFeatures(ttr=v / n, v1=v1, v2=v2, honore_r=honore_r, yule_k=yule_k)


def count_syllables(word: str) -> int:
    w = word.lower()
    runs = 0
    prev_vowel = False
    for ch in w:
        is_vowel = ch in _VOWELS
        if is_vowel and not prev_vowel:
            runs += 1
        prev_vowel = is_vowel
    # silent final 'e': its own run, and not the only one
    if runs > 1 and w.endswith("e") and (len(w) < 2 or w[-2] not in _VOWELS):
        runs -= 1
    return max(1, runs)


def readability(text: str) -> ReadabilityFeatures:
    tokenization = tokenize(text)
    w = len(tokenization.tokens)
    s = len(tokenization.sentences)
    if w == 0 or s == 0:
        return ReadabilityFeatures(fk_grade=0.0, flesch_ease=0.0, gunning_fog=0.0)
    syllables = [count_syllables(t) for t in tokenization.tokens]
    y = sum(syllables)
    c = sum(1 for count in syllables if count >= 3)
    words_per_sentence = w / s
    syllables_per_word = y / w
    return ReadabilityFeatures(
        fk_grade=0.39 * words_per_sentence + 11.8 * syllables_per_word - 15.59,
        flesch_ease=206.835 - 1.015 * words_per_sentence - 84.6 * syllables_per_word,
        gunning_fog=0.4 * (words_per_sentence + 100.0 * c / w),
    )
