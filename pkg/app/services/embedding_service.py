from __future__ import annotations

import logging
from typing import Sequence

import numpy as np

from app.adapters.embedding_providers.base import EmbeddingProvider, embed_many
from app.core.errors import EmbeddingError
from app.models.embedding import CategoryRepository
from app.models.taxonomy import IsicCode, Taxonomy
from app.services.taxonomy_service import describe

logger = logging.getLogger(__name__)


def build_category_repository(
    taxonomy: Taxonomy,
    labels: Sequence[IsicCode],
    provider: EmbeddingProvider,
) -> CategoryRepository:
    """Embed each target category's taxonomy description with `provider`."""
    codes = sorted(set(labels))
    if not codes:
        raise EmbeddingError("empty target label set")
    missing = [c for c in codes if c not in taxonomy]
    if missing:
        raise EmbeddingError(f"labels missing from taxonomy: {missing}")

    vectors = embed_many(provider, [describe(taxonomy, c) for c in codes])
    matrix = np.vstack(vectors)
    logger.info("category repository: %d categories, provider=%s dim=%d", len(codes), provider.provider_id, matrix.shape[1])
    return CategoryRepository(provider_id=provider.provider_id, dim=int(matrix.shape[1]), codes=codes, matrix=matrix)
