"""Shared word/sentence tokenization for all feature families."""
from __future__ import annotations

import re
from dataclasses import dataclass

_WORD_RE = re.compile(r"\w+", re.UNICODE)

# sentence terminator followed by whitespace or end of text
_BOUNDARY_RE = re.compile(r"[.!?]+(?=\s|$)")

# trailing-word abbreviations that do not end a sentence
ABBREVIATIONS = frozenset(
    {
        "mr.", "mrs.", "ms.", "dr.", "prof.", "gen.", "rep.", "sen.", "gov.",
        "jr.", "sr.", "st.", "mt.", "etc.", "e.g.", "i.e.", "vs.", "cf.",
        "inc.", "ltd.", "co.", "corp.", "dept.", "est.", "fig.", "no.",
        "vol.", "a.m.", "p.m.", "u.s.", "u.k.", "u.n.", "jan.", "feb.",
        "mar.", "apr.", "jun.", "jul.", "aug.", "sep.", "sept.", "oct.",
        "nov.", "dec.",
    }
)


@dataclass(frozen=True)
class Tokenization:
    tokens: tuple[str, ...]  # lowercase word tokens
    sentences: tuple[tuple[int, int], ...]  # half-open token ranges


def split_sentences(text: str) -> list[str]:
    """Split on {. ! ?} followed by whitespace/end, guarding abbreviations."""
    if not text.strip():
        return []
    pieces: list[str] = []
    start = 0
    for match in _BOUNDARY_RE.finditer(text):
        end = match.end()
        trailing = text[start:end].rsplit(None, 1)
        word = trailing[-1].lower() if trailing else ""
        if word in ABBREVIATIONS:
            continue
        pieces.append(text[start:end])
        start = end
    rest = text[start:]
    if rest.strip():
        pieces.append(rest)
    return pieces


def tokenize(text: str) -> Tokenization:
    """Unicode word tokenization, lowercased, with sentence token ranges.

    Sentence ranges partition [0, len(tokens)); sentences without any word
    token are dropped.
    """
    tokens: list[str] = []
    sentences: list[tuple[int, int]] = []
    for sentence in split_sentences(text):
        words = _WORD_RE.findall(sentence.lower())
        if not words:
            continue
        start = len(tokens)
        tokens.extend(words)
        sentences.append((start, len(tokens)))
    return Tokenization(tokens=tuple(tokens), sentences=tuple(sentences))
