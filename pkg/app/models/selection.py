from __future__ import annotations

from typing import List

from pydantic import BaseModel, ConfigDict, Field


class ProviderScore(BaseModel):
    model_config = ConfigDict(frozen=True)

    provider_id: str
    accuracy: float = Field(ge=0.0, le=1.0)
    evaluated_count: int = Field(ge=0)


class SelectionReport(BaseModel):
    """Scores sorted by accuracy descending, ties by ascending provider_id; winner is first."""
    model_config = ConfigDict(frozen=True)

    scores: List[ProviderScore]
    winner: str
