from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, model_validator

from app.core.errors import EmbeddingError
from app.models.taxonomy import IsicCode

# 1-D float64 array of provider-fixed length d.
EmbeddingVector = npt.NDArray[np.float64]


def to_vector(values: Iterable[float] | np.ndarray, dim: Optional[int] = None) -> EmbeddingVector:
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise EmbeddingError(f"embedding must be a non-empty 1-D vector, got shape {v.shape}")
    if dim is not None and v.size != dim:
        raise EmbeddingError(f"dimension mismatch: {v.size} != {dim}")
    if not np.all(np.isfinite(v)):
        raise EmbeddingError("embedding contains non-finite values")
    return v


@dataclass(frozen=True)
class CategoryRepository:
    """
    Embedding of each category's description, all from one provider.
    `codes` is sorted ascending and `matrix[i]` belongs to `codes[i]`.
    """
    provider_id: str
    dim: int
    codes: List[IsicCode]
    matrix: np.ndarray = field(repr=False)

    @property
    def entries(self) -> Dict[IsicCode, EmbeddingVector]:
        return {code: self.matrix[i] for i, code in enumerate(self.codes)}

    def __len__(self) -> int:
        return len(self.codes)


class ProviderDescriptor(BaseModel):
    """
    How to reach a provider from config:
    - endpoint "hashing:<d>"  -> built-in hashing provider of dimension d
    - endpoint "http(s)://..." -> remote provider speaking POST /v1/embed
    """
    model_config = ConfigDict(extra="forbid", frozen=True)

    id: Optional[str] = None
    endpoint: str
    dim: Optional[int] = None

    @property
    def is_hashing(self) -> bool:
        return self.endpoint.startswith("hashing:")

    @property
    def hashing_dim(self) -> int:
        return int(self.endpoint.split(":", 1)[1])

    @property
    def provider_id(self) -> str:
        if self.id:
            return self.id
        return f"hashing-fnv1a-{self.hashing_dim}"

    @model_validator(mode="after")
    def _check(self) -> "ProviderDescriptor":
        if self.is_hashing:
            try:
                d = self.hashing_dim
            except ValueError:
                raise ValueError(f"bad hashing endpoint {self.endpoint!r}, expected 'hashing:<d>'") from None
            if d < 1:
                raise ValueError("hashing dimension must be >= 1")
        elif self.endpoint.startswith(("http://", "https://")):
            if not self.id:
                raise ValueError(f"remote provider {self.endpoint!r} needs an id")
        else:
            raise ValueError(f"unsupported provider endpoint {self.endpoint!r}")
        if self.dim is not None and self.dim < 1:
            raise ValueError("dim must be >= 1")
        return self
