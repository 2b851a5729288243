from __future__ import annotations

from typing import Optional, Tuple

from app.adapters.embedding_providers.base import EmbeddingProvider
from app.concurrency.read_write_lock import ReadWriteLock
from app.core.errors import BundleError
from app.models.pipeline import ModelBundle

Loaded = Tuple[ModelBundle, EmbeddingProvider]


class BundleStore:
    """
    Holds the bundle the service answers from, with the provider that
    embeds request texts. Readers get a consistent (bundle, provider)
    pair; swap() replaces both under the write lock.
    """
    _singleton: "BundleStore | None" = None

    def __init__(self) -> None:
        self._lock = ReadWriteLock()
        self._loaded: Optional[Loaded] = None

    @classmethod
    def instance(cls) -> "BundleStore":
        if not cls._singleton:
            cls._singleton = cls()
        return cls._singleton

    def swap(self, bundle: ModelBundle, provider: EmbeddingProvider) -> None:
        if provider.provider_id != bundle.weights.provider_id:
            raise BundleError(
                f"provider {provider.provider_id!r} does not match bundle provider {bundle.weights.provider_id!r}"
            )
        with self._lock.write_lock():
            self._loaded = (bundle, provider)

    def get(self) -> Optional[Loaded]:
        with self._lock.read_lock():
            return self._loaded

    def clear(self) -> None:
        with self._lock.write_lock():
            self._loaded = None
