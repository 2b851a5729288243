from __future__ import annotations

from typing import List, Tuple

import numpy as np

from app.core.errors import EmbeddingError
from app.models.embedding import CategoryRepository, EmbeddingVector
from app.models.taxonomy import IsicCode


def _norm(v: np.ndarray) -> float:
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise EmbeddingError("cosine similarity is undefined for a zero-norm vector")
    return n


def cosine_similarity(u: EmbeddingVector, v: EmbeddingVector) -> float:
    """dot(u, v) / (|u| |v|), clamped to [-1, 1] against rounding."""
    if u.shape != v.shape:
        raise EmbeddingError(f"dimension mismatch: {u.shape[0]} != {v.shape[0]}")
    s = float(u @ v) / (_norm(u) * _norm(v))
    return max(-1.0, min(1.0, s))


def rank_categories(repository: CategoryRepository, query: EmbeddingVector) -> List[Tuple[IsicCode, float]]:
    """
    Exact scan over every category.
    Search : O(ND) for N categories of dimension D
    Ties break by ascending code.
    """
    if len(repository) == 0:
        raise EmbeddingError("empty category repository")
    if query.shape != (repository.dim,):
        raise EmbeddingError(f"query dim {query.shape[0]} != repository dim {repository.dim}")
    scores = [(code, cosine_similarity(query, repository.matrix[i])) for i, code in enumerate(repository.codes)]
    scores.sort(key=lambda t: (-t[1], t[0]))
    return scores


def nearest_category(repository: CategoryRepository, query: EmbeddingVector) -> Tuple[IsicCode, float]:
    return rank_categories(repository, query)[0]
