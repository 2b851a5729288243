"""
Deterministic bag-of-tokens embedder used in tests and offline runs.

Scheme (bit-exact):
  1. tokens = maximal runs of alphanumeric characters, lowercased
     (if there are none, the whole trimmed text is the single token)
  2. bucket = FNV-1a 64-bit hash of the token's UTF-8 bytes, mod d
  3. vector[bucket] += 1.0
"""

from __future__ import annotations

import re
from typing import List, Optional, Sequence

import numpy as np

from app.core.errors import EmbeddingError
from app.models.embedding import EmbeddingVector

FNV64_OFFSET = 0xCBF29CE484222325
FNV64_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1

_TOKEN_RE = re.compile(r"[^\W_]+")


def fnv1a_64(data: bytes) -> int:
    h = FNV64_OFFSET
    for byte in data:
        h ^= byte
        h = (h * FNV64_PRIME) & _MASK64
    return h


def tokenize(text: str) -> List[str]:
    tokens = [t.lower() for t in _TOKEN_RE.findall(text)]
    if not tokens and text.strip():
        tokens = [text.strip().lower()]
    return tokens


class HashingProvider:
    def __init__(self, dim: int, provider_id: Optional[str] = None) -> None:
        if dim < 1:
            raise EmbeddingError("hashing dimension must be >= 1")
        self._dim = dim
        self._id = provider_id or f"hashing-fnv1a-{dim}"

    @property
    def provider_id(self) -> str:
        return self._id

    @property
    def dimension(self) -> int:
        return self._dim

    def bucket(self, token: str) -> int:
        return fnv1a_64(token.encode("utf-8")) % self._dim

    def embed_one(self, text: str) -> EmbeddingVector:
        tokens = tokenize(text)
        if not tokens:
            raise EmbeddingError("cannot embed empty text")
        v = np.zeros(self._dim, dtype=np.float64)
        for token in tokens:
            v[self.bucket(token)] += 1.0
        return v

    def embed_batch(self, texts: Sequence[str]) -> List[EmbeddingVector]:
        return [self.embed_one(t) for t in texts]
