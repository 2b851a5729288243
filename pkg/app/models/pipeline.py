from __future__ import annotations

from dataclasses import dataclass
from typing import List, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.models.dataset import SplitIndices
from app.models.embedding import ProviderDescriptor
from app.models.head import HeadWeights, TrainConfig, TrainHistory
from app.models.metrics import EvaluationReport
from app.models.selection import SelectionReport
from app.models.taxonomy import Taxonomy


class PipelineConfig(BaseModel):
    """
    Everything a run needs. Unknown keys are rejected.
    - phase1_scope: "corpus" scores providers on the whole coarsened corpus,
      "train" only on the train partition
    """
    model_config = ConfigDict(extra="forbid", frozen=True)

    taxonomy_path: str
    dataset_path: str
    providers: List[ProviderDescriptor] = Field(min_length=1)
    test_fraction: float = Field(default=0.2, gt=0, lt=1)
    seed: int = 0
    train: TrainConfig = Field(default_factory=TrainConfig)
    output_dir: str
    phase1_scope: Literal["corpus", "train"] = "corpus"
    taxonomy_revision: str = ""

    @field_validator("taxonomy_path", "dataset_path", "output_dir")
    @classmethod
    def _non_empty(cls, v: str) -> str:
        if not v.strip():
            raise ValueError("path must be non-empty")
        return v


@dataclass(frozen=True)
class ModelBundle:
    """
    The persisted result of one run. Self-describing: it carries the taxonomy
    snapshot and the provider descriptors, so loading needs nothing else
    besides a reachable provider.
    """
    weights: HeadWeights
    selection: SelectionReport
    evaluation: EvaluationReport
    config: PipelineConfig
    taxonomy: Taxonomy
    split: SplitIndices
    history: TrainHistory
    version: str = ""
