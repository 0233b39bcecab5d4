"""Dense document vectors for clustering, and the distance DBSCAN runs on.

The default provider is a hashed bag-of-words: lowercase word tokens are
hashed into a fixed number of buckets with FNV-1a 64 (a published hash with
no process salt), term-frequency weighted and L2-normalized.  A file
provider loads precomputed vectors from a sidecar file keyed by article id
(one line per article: ``id<TAB>v1,v2,...,vd``), so externally trained
embeddings can be plugged in.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

DEFAULT_DIM = 512

# Zero vectors (empty documents) are maximally unrelated to everything in
# the nonnegative-embedding regime, including themselves: they become noise.
ZERO_VECTOR_DISTANCE = 1.0

_WORD_RE = re.compile(r"\w+", re.UNICODE)

FNV_OFFSET_BASIS = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


def fnv1a_64(data: bytes, seed: int = 0) -> int:
    """FNV-1a 64-bit; the seed is mixed into the offset basis."""
    h = FNV_OFFSET_BASIS ^ (seed & _MASK64)
    for byte in data:
        h ^= byte
        h = (h * FNV_PRIME) & _MASK64
    return h


@dataclass(frozen=True)
class DocVector:
    values: np.ndarray  # shape (d,), float64
    norm_flag: bool  # True iff the L2 norm was > 0 (vector stored normalized)

    def __len__(self) -> int:
        return len(self.values)


def make_doc_vector(values: np.ndarray) -> DocVector:
    values = np.asarray(values, dtype=np.float64)
    norm = float(np.linalg.norm(values))
    if norm > 0.0:
        return DocVector(values=values / norm, norm_flag=True)
    return DocVector(values=values, norm_flag=False)


class HashedBowEmbedder:
    """Deterministic stand-in for pretrained document embeddings."""

    def __init__(self, dim: int = DEFAULT_DIM, seed: int = 0) -> None:
        if dim <= 0:
            raise ValueError("embedding dim must be positive")
        self.dim = dim
        self.seed = seed

    def bucket(self, token: str) -> int:
        return fnv1a_64(token.encode("utf-8"), seed=self.seed) % self.dim

    def embed(self, text: str) -> DocVector:
        values = np.zeros(self.dim, dtype=np.float64)
        for token in _WORD_RE.findall(text.lower()):
            values[self.bucket(token)] += 1.0
        return make_doc_vector(values)

    def vector_for(self, article) -> DocVector:
        return self.embed(article.text)


class FileEmbedder:
    """Precomputed vectors from a sidecar file keyed by article id."""

    def __init__(self, path: str | Path, dim: int = DEFAULT_DIM) -> None:
        self.dim = dim
        self.vectors: dict[str, DocVector] = {}
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip():
                continue
            doc_id, sep, rest = line.partition("\t")
            if not sep:
                raise ValueError(f"{path} line {lineno}: expected id<TAB>v1,v2,...")
            values = np.array([float(x) for x in rest.split(",")], dtype=np.float64)
            if len(values) != dim:
                raise ValueError(
                    f"{path} line {lineno}: expected {dim} components, got {len(values)}"
                )
            self.vectors[doc_id] = make_doc_vector(values)

    def vector_for(self, article) -> DocVector:
        vec = self.vectors.get(article.id)
        if vec is None:
            # unknown article falls out as clustering noise rather than crashing
            return DocVector(values=np.zeros(self.dim), norm_flag=False)
        return vec


def cosine_distance(u: DocVector, v: DocVector) -> float:
    """1 minus the cosine similarity; zero vectors get the sentinel distance."""
    if len(u) != len(v):
        raise ValueError(f"dimension mismatch: {len(u)} vs {len(v)}")
    if not u.norm_flag or not v.norm_flag:
        return ZERO_VECTOR_DISTANCE
    nu = float(np.linalg.norm(u.values))
    nv = float(np.linalg.norm(v.values))
    return 1.0 - float(np.dot(u.values, v.values)) / (nu * nv)


def distance_matrix(vectors: list[DocVector]) -> np.ndarray:
    """Pairwise cosine distances with the zero-vector sentinel applied.

    Vectorized over rows; layout is deterministic regardless of how the
    multiplication is scheduled internally.
    """
    n = len(vectors)
    if n == 0:
        return np.zeros((0, 0))
    dim = len(vectors[0])
    for v in vectors:
        if len(v) != dim:
            raise ValueError("dimension mismatch in vector list")
    m = np.stack([v.values for v in vectors])
    norms = np.linalg.norm(m, axis=1)
    nonzero = norms > 0.0
    safe = np.where(nonzero, norms, 1.0)
    dist = 1.0 - (m @ m.T) / np.outer(safe, safe)
    # force exact symmetry: blocked matmul may differ by ulps across the diagonal
    dist = np.triu(dist) + np.triu(dist, 1).T
    dist[~nonzero, :] = ZERO_VECTOR_DISTANCE
    dist[:, ~nonzero] = ZERO_VECTOR_DISTANCE
    return dist
