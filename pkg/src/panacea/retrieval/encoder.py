"""Text-encoder and reranker adapters with deterministic built-ins.

The production system would plug a sentence-embedding service and a neural
reranker in via these interfaces; the built-ins are a hashed TF-IDF encoder
and cosine scoring, deterministic across runs and platforms.
"""

from __future__ import annotations

import hashlib
from typing import Optional, Protocol

import numpy as np

from ..corpus.text import tokenize
from .index import InvertedIndex

DEFAULT_DIM = 256


class Encoder(Protocol):
    dim: int

    def encode(self, text: str) -> np.ndarray: ...


class Reranker(Protocol):
    def score(self, query: str, text: str) -> float: ...


def _stable_hash(token: str) -> bytes:
    return hashlib.md5(token.encode("utf-8")).digest()


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


class HashedTfidfEncoder:
    """Signed feature hashing of term frequencies, IDF-weighted, L2-normalized.

    IDF comes from an inverted index when one is supplied (same smoothed
    formula BM25 uses); otherwise every term weighs 1. Deterministic: buckets
    and signs derive from md5 of the token.
    """

    def __init__(self, dim: int = DEFAULT_DIM, index: Optional[InvertedIndex] = None):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.dim = dim
        self.index = index
        self._cache: dict[str, tuple[int, float]] = {}

    def _slot(self, token: str) -> tuple[int, float]:
        cached = self._cache.get(token)
        if cached is None:
            digest = _stable_hash(token)
            bucket = int.from_bytes(digest[:8], "little") % self.dim
            sign = 1.0 if digest[8] % 2 == 0 else -1.0
            cached = (bucket, sign)
            self._cache[token] = cached
        return cached

    def _idf(self, token: str) -> float:
        if self.index is None:
            return 1.0
        return self.index.idf(token)

    def encode(self, text: str) -> np.ndarray:
        vec = np.zeros(self.dim, dtype=np.float64)
        tokens = tokenize(text)
        if not tokens:
            return vec
        counts: dict[str, int] = {}
        for tok in tokens:
            counts[tok] = counts.get(tok, 0) + 1
        for tok, tf in counts.items():
            bucket, sign = self._slot(tok)
            vec[bucket] += sign * tf * self._idf(tok)
        norm = np.linalg.norm(vec)
        if norm > 0.0:
            vec /= norm
        return vec


class CosineReranker:
    """Built-in second-stage scorer: cosine of encoder embeddings."""

    def __init__(self, encoder: Encoder):
        self.encoder = encoder

    def score(self, query: str, text: str) -> float:
        return cosine(self.encoder.encode(query), self.encoder.encode(text))
