from __future__ import annotations

from typing import Dict, Tuple

from pydantic import BaseModel, ConfigDict

from app.models.taxonomy import IsicCode


class LabeledExample(BaseModel):
    """An activity description with its ISIC label (class, or division after coarsening)."""
    model_config = ConfigDict(frozen=True)

    activity_name: str
    label: IsicCode


class Dataset(BaseModel):
    """
    Examples in ingestion order. The order matters: seeded splits index into it.
    """
    model_config = ConfigDict(frozen=True)

    examples: Tuple[LabeledExample, ...]
    source: str = ""

    @property
    def row_count(self) -> int:
        return len(self.examples)

    def __len__(self) -> int:
        return len(self.examples)

    @property
    def texts(self) -> list[str]:
        return [e.activity_name for e in self.examples]

    @property
    def labels(self) -> list[IsicCode]:
        return [e.label for e in self.examples]


class LabelSpace(BaseModel):
    model_config = ConfigDict(frozen=True)

    labels: Tuple[IsicCode, ...]
    supports: Tuple[int, ...]

    def index(self) -> Dict[IsicCode, int]:
        return {label: k for k, label in enumerate(self.labels)}

    def __len__(self) -> int:
        return len(self.labels)


class SplitIndices(BaseModel):
    """Positions into the source dataset; both lists ascending."""
    model_config = ConfigDict(frozen=True)

    seed: int
    test_fraction: float
    train_indices: Tuple[int, ...]
    test_indices: Tuple[int, ...]
