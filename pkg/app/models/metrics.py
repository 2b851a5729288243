from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

from pydantic import BaseModel, ConfigDict

from app.models.taxonomy import IsicCode


@dataclass(frozen=True)
class ConfusionTally:
    """
    One-vs-rest counts per class k (all tuples aligned with `labels`).
    For every k: tp + tn + fp + fn == n.
    """
    labels: Tuple[IsicCode, ...]
    tp: Tuple[int, ...]
    tn: Tuple[int, ...]
    fp: Tuple[int, ...]
    fn: Tuple[int, ...]
    n: int


@dataclass(frozen=True)
class ClassMetrics:
    labels: Tuple[IsicCode, ...]
    precision: Tuple[float, ...]
    recall: Tuple[float, ...]
    f1: Tuple[float, ...]
    support: Tuple[int, ...]


class ClassRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    label: IsicCode
    precision: float
    recall: float
    f1: float
    support: int


class EvaluationReport(BaseModel):
    """
    Headline metrics are support-weighted; `one_vs_rest_accuracy` is the
    literal sum-of-(TP+TN) form kept only as a diagnostic.
    """
    model_config = ConfigDict(frozen=True)

    n: int
    accuracy: float
    precision_weighted: float
    recall_weighted: float
    f1_weighted: float
    one_vs_rest_accuracy: float
    per_class: List[ClassRow]
