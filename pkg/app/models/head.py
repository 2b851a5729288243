from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from app.core.errors import TrainingError
from app.models.taxonomy import IsicCode


class TrainConfig(BaseModel):
    """
    Phase-2 hyperparameters. Defaults: Adam at lr 0.001 for 30 epochs,
    mini-batches of 32 reshuffled each epoch from `shuffle_seed`.
    """
    model_config = ConfigDict(extra="forbid", frozen=True)

    learning_rate: float = Field(default=0.001, gt=0)
    epochs: int = Field(default=30, ge=1)
    batch_size: int = Field(default=32, ge=1)
    adam_beta1: float = Field(default=0.9, ge=0, lt=1)
    adam_beta2: float = Field(default=0.999, ge=0, lt=1)
    adam_epsilon: float = Field(default=1e-8, gt=0)
    shuffle_seed: int = 0


@dataclass(frozen=True)
class HeadWeights:
    """Softmax layer over frozen d-dimensional embeddings: W is |K| x d, b is |K|."""
    labels: Tuple[IsicCode, ...]
    W: np.ndarray = field(repr=False)
    b: np.ndarray = field(repr=False)
    provider_id: str = ""

    def __post_init__(self) -> None:
        if not self.labels:
            raise TrainingError("head needs at least one label")
        if len(set(self.labels)) != len(self.labels):
            raise TrainingError("duplicate labels in head")
        if self.W.ndim != 2 or self.W.shape[0] != len(self.labels):
            raise TrainingError(f"W shape {self.W.shape} does not match {len(self.labels)} labels")
        if self.b.shape != (len(self.labels),):
            raise TrainingError(f"b shape {self.b.shape} does not match {len(self.labels)} labels")
        if not (np.all(np.isfinite(self.W)) and np.all(np.isfinite(self.b))):
            raise TrainingError("head weights contain non-finite values")

    @property
    def dim(self) -> int:
        return int(self.W.shape[1])


@dataclass(frozen=True)
class AdamState:
    m_W: np.ndarray
    m_b: np.ndarray
    v_W: np.ndarray
    v_b: np.ndarray
    t: int = 0


class TrainHistory(BaseModel):
    step_losses: List[float] = Field(default_factory=list)
    epoch_losses: List[float] = Field(default_factory=list)
    epoch_eval_accuracy: Optional[List[float]] = None
