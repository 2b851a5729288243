"""
JSON-Lines embedding cache.

One record per (provider, text):
  {"provider_id": ..., "dim": d, "text_sha256": ..., "values": [...]}
Lookups key on (provider_id, text_sha256). Floats are written with repr
precision so cached vectors are bit-identical to freshly computed ones.
"""

from __future__ import annotations

import hashlib
import json
import logging
import threading
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.adapters.embedding_providers.base import EmbeddingProvider, check_vectors
from app.concurrency.read_write_lock import KeyedLock
from app.core.errors import EmbeddingError
from app.models.embedding import EmbeddingVector

logger = logging.getLogger(__name__)

CacheKey = Tuple[str, str]


def text_sha256(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class EmbeddingCache:
    def __init__(self, path: Optional[Path] = None) -> None:
        self.path = Path(path) if path else None
        self._entries: Dict[CacheKey, EmbeddingVector] = {}
        self._key_locks = KeyedLock()
        self._append_lock = threading.Lock()
        if self.path and self.path.exists():
            self._load()

    def _load(self) -> None:
        assert self.path is not None
        with self.path.open(encoding="utf-8") as fh:
            for n, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                    values = np.asarray(rec["values"], dtype=np.float64)
                    if values.shape != (int(rec["dim"]),):
                        raise ValueError("dim does not match values")
                    self._entries[(rec["provider_id"], rec["text_sha256"])] = values
                except (KeyError, TypeError, ValueError) as e:
                    raise EmbeddingError(f"corrupt cache record at {self.path}:{n}: {e}") from e
        logger.info("embedding cache %s: %d records", self.path, len(self._entries))

    def get(self, provider_id: str, text: str) -> Optional[EmbeddingVector]:
        return self._entries.get((provider_id, text_sha256(text)))

    def put(self, provider_id: str, text: str, values: EmbeddingVector) -> EmbeddingVector:
        """Store once per key; returns whichever vector ended up cached."""
        key = (provider_id, text_sha256(text))
        with self._key_locks.hold(key):
            existing = self._entries.get(key)
            if existing is not None:
                return existing
            if self.path is not None:
                record = {
                    "provider_id": provider_id,
                    "dim": int(values.shape[0]),
                    "text_sha256": key[1],
                    "values": values.tolist(),
                }
                with self._append_lock:
                    self.path.parent.mkdir(parents=True, exist_ok=True)
                    with self.path.open("a", encoding="utf-8") as fh:
                        fh.write(json.dumps(record) + "\n")
            self._entries[key] = values
            return values

    def __len__(self) -> int:
        return len(self._entries)


class CachedProvider:
    """Wraps a provider; cached and uncached paths return identical vectors."""

    def __init__(self, inner: EmbeddingProvider, cache: EmbeddingCache) -> None:
        self.inner = inner
        self.cache = cache

    @property
    def provider_id(self) -> str:
        return self.inner.provider_id

    @property
    def dimension(self) -> int:
        return self.inner.dimension

    def embed_batch(self, texts: Sequence[str]) -> List[EmbeddingVector]:
        pid = self.provider_id
        found: Dict[str, EmbeddingVector] = {}
        missing: List[str] = []
        for t in texts:
            if t in found or t in missing:
                continue
            hit = self.cache.get(pid, t)
            if hit is None:
                missing.append(t)
            else:
                found[t] = hit
        if missing:
            fresh = self.inner.embed_batch(missing)
            check_vectors(pid, self.dimension, fresh, len(missing))
            for t, v in zip(missing, fresh):
                found[t] = self.cache.put(pid, t, v)
        return [found[t] for t in texts]
