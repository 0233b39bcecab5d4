"""Lexicon loading and per-lexicon frequency features.

Lexicon file format: UTF-8, first line ``#name <lexicon-name>``, one entry
per line, ``*`` suffix marks a prefix wildcard.  LIWC category files can be
exported to this format by licence holders; the repo ships open substitutes
for hedges, assertives, and subjectives.
"""
from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .tokenizer import Tokenization

BUILTIN_LEXICON_FILES = ("hedges.txt", "assertives.txt", "subjectives.txt")


@dataclass(frozen=True)
class Lexicon:
    name: str
    terms: frozenset[str]  # exact lowercase entries
    prefixes: tuple[str, ...]  # wildcard entries, '*' stripped

    def matches(self, token: str) -> bool:
        return token in self.terms or (bool(self.prefixes) and token.startswith(self.prefixes))


def _parse_lexicon(name_fallback: str, lines: list[str]) -> Lexicon:
    name = name_fallback
    terms: set[str] = set()
    prefixes: set[str] = set()
    for i, raw in enumerate(lines):
        line = raw.strip()
        if not line:
            continue
        if i == 0 and line.startswith("#name"):
            name = line[len("#name") :].strip() or name_fallback
            continue
        if line.startswith("#"):
            continue
        entry = line.lower()
        if entry.endswith("*"):
            if len(entry) > 1:
                prefixes.add(entry[:-1])
        else:
            terms.add(entry)
    if not name:
        raise ValueError("lexicon must have a non-empty name")
    return Lexicon(name=name, terms=frozenset(terms), prefixes=tuple(sorted(prefixes)))


def load_lexicon(path: str | Path) -> Lexicon:
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    return _parse_lexicon(path.stem, lines)


def builtin_lexicons() -> list[Lexicon]:
    """The shipped open substitutes, in a fixed order."""
    lexicons = []
    for filename in BUILTIN_LEXICON_FILES:
        text = resources.files("newswatch").joinpath(f"data/{filename}").read_text("utf-8")
        lexicons.append(_parse_lexicon(Path(filename).stem, text.splitlines()))
    return lexicons


def lexicon_features(tokenization: Tokenization, lexicons: list[Lexicon]) -> list[float]:
    """Per lexicon: matching-token count / max(1, total tokens)."""
    tokens = tokenization.tokens
    denom = max(1, len(tokens))
    return [sum(1 for t in tokens if lex.matches(t)) / denom for lex in lexicons]
