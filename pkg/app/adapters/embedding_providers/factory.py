from __future__ import annotations

from typing import Optional

from app.adapters.embedding_providers.base import EmbeddingProvider
from app.adapters.embedding_providers.cached_provider import CachedProvider, EmbeddingCache
from app.adapters.embedding_providers.hashing_provider import HashingProvider
from app.adapters.embedding_providers.http_provider import HttpEmbeddingProvider
from app.models.embedding import ProviderDescriptor


def build_provider(descriptor: ProviderDescriptor, cache: Optional[EmbeddingCache] = None) -> EmbeddingProvider:
    provider: EmbeddingProvider
    if descriptor.is_hashing:
        provider = HashingProvider(descriptor.hashing_dim, provider_id=descriptor.id)
    else:
        provider = HttpEmbeddingProvider(descriptor.provider_id, descriptor.endpoint, dim=descriptor.dim)
    if cache is not None:
        provider = CachedProvider(provider, cache)
    return provider
