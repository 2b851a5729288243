from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import List, Protocol, Sequence, runtime_checkable

import numpy as np

from app.core.config import settings
from app.core.errors import EmbeddingError, ProviderError
from app.models.embedding import EmbeddingVector


@runtime_checkable
class EmbeddingProvider(Protocol):
    """
    Contract every provider honours:
    - deterministic: same text -> identical vector for a given provider_id
    - vectors are finite, of length `dimension`, never all-zero
    - embed_batch returns vectors in input order
    """
    @property
    def provider_id(self) -> str:
        ...

    @property
    def dimension(self) -> int:
        ...

    def embed_batch(self, texts: Sequence[str]) -> List[EmbeddingVector]:
        ...


def check_vectors(provider_id: str, dim: int, vectors: Sequence[np.ndarray], expected: int) -> None:
    if len(vectors) != expected:
        raise ProviderError(provider_id, f"returned {len(vectors)} vectors for {expected} texts")
    for v in vectors:
        if v.shape != (dim,):
            raise ProviderError(provider_id, f"vector shape {v.shape} != ({dim},)")
        if not np.all(np.isfinite(v)):
            raise ProviderError(provider_id, "vector contains non-finite values")
        if not np.any(v):
            raise ProviderError(provider_id, "returned an all-zero vector")


def _clean(text: str) -> str:
    cleaned = text.strip()
    if not cleaned:
        raise EmbeddingError("cannot embed empty text")
    return cleaned


def embed(provider: EmbeddingProvider, text: str) -> EmbeddingVector:
    return provider.embed_batch([_clean(text)])[0]


def embed_many(
    provider: EmbeddingProvider,
    texts: Sequence[str],
    *,
    batch_size: int | None = None,
    workers: int | None = None,
) -> List[EmbeddingVector]:
    """Embed in batches, possibly concurrently; output order == input order."""
    cleaned = [_clean(t) for t in texts]
    if not cleaned:
        return []
    size = max(1, batch_size or settings.ISIC_ENGINE_EMBED_BATCH)
    batches = [cleaned[i:i + size] for i in range(0, len(cleaned), size)]
    n_workers = max(1, min(workers or settings.ISIC_ENGINE_EMBED_WORKERS, len(batches)))
    if n_workers == 1:
        results = [provider.embed_batch(b) for b in batches]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(provider.embed_batch, batches))
    return [v for batch in results for v in batch]
