"""Deterministic synthetic labeled corpus with planted class signal.

Two signal channels are planted per document:

* a lexical channel (class-specific vocabulary and marker words), flipped
  with probability 0.10, which is all that case-folded word n-grams can see;
* a style channel (exclamations, all-caps words, sentence length, digits,
  quotation marks), flipped with probability 0.02, visible only to the
  style/NELA families.

A words-only baseline therefore tops out near the lexical noise ceiling
while the full feature set can recover the cleaner style channel.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .corpus import NON_PROPAGANDA, PROPAGANDA, LabeledDoc

LEXICAL_FLIP = 0.10
STYLE_FLIP = 0.02

SHARED_WORDS = (
    "government city country people report week market company group leader members "
    "public plan state national local police court law budget school health water "
    "energy road project meeting officials agency minister president council party "
    "election vote economy trade jobs workers industry technology science research "
    "study data system service program policy region border security defense military "
    "weather storm river farm food prices housing transport airport station hospital "
    "doctor patient teacher student university history culture music film sports team "
    "game season coach player festival museum library church community family children "
    "parents youth visitors tourism hotel restaurant business bank investment fund tax "
    "revenue spending growth decline increase announcement statement interview "
    "conference summit agreement deal contract partnership negotiation committee "
    "residents neighbors streets bridges harbor railway factory union strike protest "
    "petition survey census ballot debate hearing ruling verdict appeal settlement"
).split()

PROPAGANDA_WORDS = (
    "traitors enemies truth lies corrupt elite shadow secret agenda betrayal scandal "
    "outrage disgrace shameful fake hoax plot conspiracy puppet regime tyranny invasion "
    "threat danger crisis collapse destroy ruin evil wicked patriots heroes glory "
    "victory awaken fight battle war doom shocking disgusting"
).split()

NEUTRAL_WORDS = (
    "analysis assessment methodology infrastructure implementation administration "
    "development collaboration representatives documentation participation "
    "recommendation coordination institutional parliamentary constitutional "
    "environmental international organization distribution requirements proportion "
    "estimated approximately percentage statistics commission regulation legislation "
    "framework provision allocation evaluation consultation referendum amendment "
    "jurisdiction municipality demographic preliminary"
).split()


def _sentence(rng: np.random.Generator, lexical: int, style: int) -> str:
    class_pool = PROPAGANDA_WORDS if lexical == 1 else NEUTRAL_WORDS
    length = int(rng.integers(5, 10)) if style == 1 else int(rng.integers(12, 21))
    words = [
        str(rng.choice(class_pool)) if rng.random() < 0.25 else str(rng.choice(SHARED_WORDS))
        for _ in range(length)
    ]
    if style == 1:
        if rng.random() < 0.45:
            words.insert(int(rng.integers(0, len(words))), "you")
        if rng.random() < 0.35:
            pos = int(rng.integers(0, len(words)))
            words[pos] = words[pos].upper()
        terminator = "!" if rng.random() < 0.55 else ("?" if rng.random() < 0.15 else ".")
    else:
        if rng.random() < 0.35:
            words.insert(int(rng.integers(0, len(words))), str(rng.integers(1000, 10000)))
        if rng.random() < 0.30:
            pos = int(rng.integers(0, len(words)))
            words[pos] = f'"{words[pos]}"'
        terminator = "?" if rng.random() < 0.05 else "."
    words[0] = words[0].capitalize()
    return " ".join(words) + terminator


def planted_corpus(n_docs: int = 5000, seed: int = 7) -> list[LabeledDoc]:
    """Generate the planted-signal corpus; identical (n_docs, seed) means
    identical documents."""
    rng = np.random.default_rng(seed)
    docs: list[LabeledDoc] = []
    for _ in range(n_docs):
        label = int(rng.integers(0, 2))
        lexical = label if rng.random() >= LEXICAL_FLIP else 1 - label
        style = label if rng.random() >= STYLE_FLIP else 1 - label
        n_sentences = int(rng.integers(4, 9))
        text = " ".join(_sentence(rng, lexical, style) for _ in range(n_sentences))
        docs.append(LabeledDoc(text=text, label=PROPAGANDA if label == 1 else NON_PROPAGANDA))
    return docs


def save_labeled_corpus(docs: list[LabeledDoc], path: str | Path) -> None:
    """Write ``label<TAB>text`` lines (1 = propaganda)."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for doc in docs:
            label = 1 if doc.label == PROPAGANDA else 0
            fh.write(f"{label}\t{doc.text}\n")
