"""L2-regularized binary maximum-entropy classifier and the propaganda index.

The objective is

    J(w, b) = -sum_i [y_i ln s(w.x_i + b) + (1 - y_i) ln(1 - s(w.x_i + b))]
              + l2_lambda * ||w||^2

with the bias unregularized, zero initialization, and a deterministic
full-batch optimizer (stop at ||grad||_inf <= 1e-6 or 1000 iterations).
The propaganda index of a document is the model probability of the
propaganda class.

Model file layout (little-endian, versioned):

    magic  b"NWMODEL\\n"
    uint32 format version
    uint32 section count
    per section: uint16 name length, name (utf-8),
                 uint64 payload length, payload

Sections: "meta" (JSON: l2_lambda, families, min_df, config fingerprint,
training summary), "lexicons" (JSON), "nela_lexicons" (JSON),
"vocab_word"/"vocab_char" (JSON term lists + fingerprint),
"idf_word"/"idf_char" (float64 array), "scaler_mean"/"scaler_std"
(float64 array), "weights" (float64 array), "bias" (one float64).
"""
from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import sparse

from .features.lexicon import Lexicon
from .features.nela import NelaLexicons
from .features.pipeline import ALL_FAMILIES, FeaturePipeline, FeatureVector, ScalerStats
from .features.vectorizer import CHAR_NGRAM_3, WORD_NGRAM_1_3, Vectorizer
from .optim import MinimizeResult, minimize

FORMAT_VERSION = 1
_MAGIC = b"NWMODEL\n"

BIN_EDGES = (0.2, 0.4, 0.6, 0.8)  # five equal-width bins over [0, 1]


class ModelFormatError(Exception):
    """Corrupt, truncated, or version-mismatched model file."""


@dataclass(frozen=True)
class ScoredArticle:
    article_id: str
    propaganda_index: float
    bin: int


@dataclass
class Model:
    weights: np.ndarray  # aligned to assembled feature columns
    bias: float
    l2_lambda: float
    pipeline: FeaturePipeline
    config_fingerprint: str = ""
    version: int = FORMAT_VERSION
    train_summary: dict | None = None


def sigmoid(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def doc_text(title: str | None, text: str) -> str:
    """Canonical featurization input for an article or submission."""
    title = (title or "").strip()
    return f"{title}\n\n{text}" if title else text


def stack_features(vectors: list[FeatureVector]) -> sparse.csr_matrix:
    if not vectors:
        raise ValueError("no feature vectors")
    width = vectors[0].width
    for fv in vectors:
        if fv.width != width:
            raise ValueError(f"feature width mismatch: {fv.width} vs {width}")
    indptr = np.zeros(len(vectors) + 1, dtype=np.int64)
    for i, fv in enumerate(vectors):
        indptr[i + 1] = indptr[i] + len(fv.indices)
    indices = np.concatenate([fv.indices for fv in vectors]) if vectors else np.zeros(0)
    data = np.concatenate([fv.values for fv in vectors]) if vectors else np.zeros(0)
    return sparse.csr_matrix((data, indices, indptr), shape=(len(vectors), width))


def objective_and_grad(
    params: np.ndarray, x: sparse.csr_matrix, y: np.ndarray, l2_lambda: float
) -> tuple[float, np.ndarray]:
    """Penalized negative log-likelihood and its gradient; params = [w, b]."""
    w = params[:-1]
    b = params[-1]
    z = x @ w + b
    # -[y ln s(z) + (1-y) ln(1-s(z))] computed stably
    loss = float(np.sum(y * np.logaddexp(0.0, -z) + (1.0 - y) * np.logaddexp(0.0, z)))
    loss += l2_lambda * float(w @ w)
    residual = sigmoid(z) - y
    grad = np.empty_like(params)
    grad[:-1] = x.T @ residual + 2.0 * l2_lambda * w
    grad[-1] = float(np.sum(residual))
    return loss, grad


def train(
    X: list[FeatureVector] | sparse.csr_matrix,
    y: list[int] | np.ndarray,
    l2_lambda: float = 1.0,
    pipeline: FeaturePipeline | None = None,
    gtol: float = 1e-6,
    max_iter: int = 1000,
) -> Model:
    """Fit weights on assembled feature vectors; deterministic given inputs."""
    if l2_lambda <= 0:
        raise ValueError("l2_lambda must be > 0")
    x = X if sparse.issparse(X) else stack_features(X)
    labels = np.asarray(y, dtype=np.float64)
    if x.shape[0] != len(labels) or len(labels) < 2:
        raise ValueError("need |X| = |y| >= 2")
    if not np.all(np.isfinite(x.data)):
        raise ValueError("non-finite feature value in training data")
    classes = set(np.unique(labels))
    if not classes <= {0.0, 1.0}:
        raise ValueError(f"labels must be binary 0/1, got {sorted(classes)}")
    if len(classes) < 2:
        raise ValueError("training data contains a single class; need both")

    params0 = np.zeros(x.shape[1] + 1, dtype=np.float64)
    result: MinimizeResult = minimize(
        lambda p: objective_and_grad(p, x, labels, l2_lambda),
        params0,
        gtol=gtol,
        max_iter=max_iter,
    )
    return Model(
        weights=result.x[:-1],
        bias=float(result.x[-1]),
        l2_lambda=l2_lambda,
        pipeline=pipeline or FeaturePipeline(flags=set()),
        train_summary={
            "n_iter": result.n_iter,
            "converged": result.converged,
            "stop_reason": result.stop_reason,
            "final_objective": result.fun,
            "grad_inf_norm": result.grad_inf_norm,
        },
    )


def predict_index(model: Model, fv: FeatureVector) -> float:
    """Propaganda index in (0, 1): the model probability of the positive class."""
    if fv.width != len(model.weights):
        raise ValueError(f"feature width {fv.width} does not match model {len(model.weights)}")
    z = float(model.weights[fv.indices] @ fv.values) + model.bias
    p = float(sigmoid(np.array([z]))[0])
    return min(max(p, 1e-15), 1.0 - 1e-15)


def bin_index(p: float) -> int:
    """Five equal-width, left-inclusive bins over the index range."""
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"propaganda index out of range: {p}")
    for i, edge in enumerate(BIN_EDGES, start=1):
        if p < edge:
            return i
    return 5


def family_contributions(model: Model, fv: FeatureVector) -> dict[str, float]:
    """w.x restricted to each family span; spans sum to the full logit - bias."""
    contributions: dict[str, float] = {}
    for family, (start, end) in fv.family_spans.items():
        mask = (fv.indices >= start) & (fv.indices < end)
        contributions[family] = float(model.weights[fv.indices[mask]] @ fv.values[mask])
    return contributions


def score_text(model: Model, text: str, title: str | None = None) -> tuple[float, int, dict]:
    fv = model.pipeline.assemble(doc_text(title, text))
    index = predict_index(model, fv)
    return index, bin_index(index), family_contributions(model, fv)


def score_article(model: Model, article) -> ScoredArticle:
    index, bucket, _ = score_text(model, article.text, article.title)
    return ScoredArticle(article_id=article.id, propaganda_index=index, bin=bucket)


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------

def _f64_bytes(arr: np.ndarray) -> bytes:
    return np.ascontiguousarray(arr, dtype="<f8").tobytes()


def _f64_array(payload: bytes) -> np.ndarray:
    if len(payload) % 8 != 0:
        raise ModelFormatError("float section length not a multiple of 8")
    return np.frombuffer(payload, dtype="<f8").copy()


def _vectorizer_sections(name: str, vec: Vectorizer) -> list[tuple[str, bytes]]:
    meta = {
        "kind": vec.kind,
        "terms": sorted(vec.vocabulary, key=vec.vocabulary.get),
        "fitted_on": vec.fitted_on,
        "min_df": vec.min_df,
    }
    return [
        (f"vocab_{name}", json.dumps(meta, ensure_ascii=False).encode("utf-8")),
        (f"idf_{name}", _f64_bytes(vec.idf)),
    ]


def save_model(model: Model, path: str | Path) -> None:
    pipe = model.pipeline
    sections: list[tuple[str, bytes]] = []
    meta = {
        "l2_lambda": model.l2_lambda,
        "families": sorted(pipe.flags),
        "min_df": pipe.min_df,
        "config_fingerprint": model.config_fingerprint,
        "train_summary": model.train_summary,
    }
    sections.append(("meta", json.dumps(meta, ensure_ascii=False).encode("utf-8")))
    lex_payload = [
        {"name": lex.name, "terms": sorted(lex.terms), "prefixes": list(lex.prefixes)}
        for lex in pipe.lexicons
    ]
    sections.append(("lexicons", json.dumps(lex_payload, ensure_ascii=False).encode("utf-8")))
    nela_payload = {
        "negations": sorted(pipe.nela_lexicons.negations),
        "swears": sorted(pipe.nela_lexicons.swears),
        "stopwords": sorted(pipe.nela_lexicons.stopwords),
    }
    sections.append(("nela_lexicons", json.dumps(nela_payload).encode("utf-8")))
    if pipe.word_vectorizer is not None:
        sections.extend(_vectorizer_sections("word", pipe.word_vectorizer))
    if pipe.char_vectorizer is not None:
        sections.extend(_vectorizer_sections("char", pipe.char_vectorizer))
    scaler = pipe.scaler or ScalerStats(mean=np.zeros(0), std=np.ones(0))
    sections.append(("scaler_mean", _f64_bytes(scaler.mean)))
    sections.append(("scaler_std", _f64_bytes(scaler.std)))
    sections.append(("weights", _f64_bytes(model.weights)))
    sections.append(("bias", struct.pack("<d", model.bias)))

    blob = bytearray()
    blob += _MAGIC
    blob += struct.pack("<II", model.version, len(sections))
    for name, payload in sections:
        encoded = name.encode("utf-8")
        blob += struct.pack("<H", len(encoded)) + encoded
        blob += struct.pack("<Q", len(payload)) + payload
    Path(path).write_bytes(bytes(blob))


def _read_exact(buf: bytes, offset: int, size: int) -> tuple[bytes, int]:
    if offset + size > len(buf):
        raise ModelFormatError("model file truncated")
    return buf[offset : offset + size], offset + size


def load_model(path: str | Path) -> Model:
    """Load a model file; predictions round-trip bit-identically."""
    buf = Path(path).read_bytes()
    head, offset = _read_exact(buf, 0, len(_MAGIC))
    if head != _MAGIC:
        raise ModelFormatError(f"{path} is not a model file (bad magic)")
    raw, offset = _read_exact(buf, offset, 8)
    version, n_sections = struct.unpack("<II", raw)
    if version != FORMAT_VERSION:
        raise ModelFormatError(
            f"unsupported model format version {version} (this build reads {FORMAT_VERSION})"
        )
    sections: dict[str, bytes] = {}
    for _ in range(n_sections):
        raw, offset = _read_exact(buf, offset, 2)
        (name_len,) = struct.unpack("<H", raw)
        name_raw, offset = _read_exact(buf, offset, name_len)
        raw, offset = _read_exact(buf, offset, 8)
        (payload_len,) = struct.unpack("<Q", raw)
        payload, offset = _read_exact(buf, offset, payload_len)
        sections[name_raw.decode("utf-8")] = payload

    def require(name: str) -> bytes:
        if name not in sections:
            raise ModelFormatError(f"model file missing section {name!r}")
        return sections[name]

    meta = json.loads(require("meta"))
    lexicons = [
        Lexicon(name=l["name"], terms=frozenset(l["terms"]), prefixes=tuple(l["prefixes"]))
        for l in json.loads(require("lexicons"))
    ]
    nela_raw = json.loads(require("nela_lexicons"))
    nela_lex = NelaLexicons(
        negations=frozenset(nela_raw["negations"]),
        swears=frozenset(nela_raw["swears"]),
        stopwords=frozenset(nela_raw["stopwords"]),
    )

    def read_vectorizer(name: str, kind: str) -> Vectorizer | None:
        if f"vocab_{name}" not in sections:
            return None
        vocab_meta = json.loads(sections[f"vocab_{name}"])
        idf = _f64_array(require(f"idf_{name}"))
        terms = vocab_meta["terms"]
        if len(idf) != len(terms):
            raise ModelFormatError(f"idf/vocabulary size mismatch in section {name}")
        return Vectorizer(
            kind=vocab_meta.get("kind", kind),
            vocabulary={t: i for i, t in enumerate(terms)},
            idf=idf,
            fitted_on=vocab_meta.get("fitted_on", ""),
            min_df=int(vocab_meta.get("min_df", 2)),
        )

    pipeline = FeaturePipeline(
        flags=set(meta["families"]),
        lexicons=lexicons,
        nela_lexicons=nela_lex,
        min_df=int(meta.get("min_df", 2)),
        word_vectorizer=read_vectorizer("word", WORD_NGRAM_1_3),
        char_vectorizer=read_vectorizer("char", CHAR_NGRAM_3),
        scaler=ScalerStats(mean=_f64_array(require("scaler_mean")), std=_f64_array(require("scaler_std"))),
    )
    weights = _f64_array(require("weights"))
    bias_raw = require("bias")
    if len(bias_raw) != 8:
        raise ModelFormatError("bias section must hold one float64")
    model = Model(
        weights=weights,
        bias=struct.unpack("<d", bias_raw)[0],
        l2_lambda=float(meta["l2_lambda"]),
        pipeline=pipeline,
        config_fingerprint=str(meta.get("config_fingerprint", "")),
        version=version,
        train_summary=meta.get("train_summary"),
    )
    if pipeline.flags and len(weights) != pipeline.width:
        raise ModelFormatError(
            f"weight width {len(weights)} does not match featurizer width {pipeline.width}"
        )
    return model
