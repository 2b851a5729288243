from __future__ import annotations

from typing import List

from pydantic import BaseModel, Field

from app.models.taxonomy import IsicCode


class ClassifyRequest(BaseModel):
    text: str
    top_n: int = Field(default=5, ge=1)


class RankedCode(BaseModel):
    code: IsicCode
    description: str
    probability: float


class DivisionShare(BaseModel):
    division: IsicCode
    probability: float


class ClassifyResponse(BaseModel):
    """
    - predictions: top_n classes, probability descending
    - division_rollup: every class probability summed by its division
    """
    predictions: List[RankedCode]
    division_rollup: List[DivisionShare]
    provider_id: str
    bundle_version: str
