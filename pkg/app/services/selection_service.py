"""
Phase 1: score each candidate provider as a zero-training nearest-category
classifier on division labels and pick the most accurate one.
"""

from __future__ import annotations

import logging
from typing import Dict, List, Sequence, Tuple

from app.adapters.embedding_providers.base import EmbeddingProvider, embed_many
from app.core.errors import ProviderError, SelectionError
from app.evaluation.metrics import accuracy
from app.indexing.brute_force import nearest_category
from app.models.dataset import Dataset
from app.models.embedding import CategoryRepository
from app.models.selection import ProviderScore, SelectionReport
from app.models.taxonomy import IsicCode, Level, Taxonomy, level_of
from app.services.dataset_service import label_space
from app.services.embedding_service import build_category_repository

logger = logging.getLogger(__name__)

PROGRESS_CHUNK = 256


class SelectionService:
    """
    Scores providers against one taxonomy. Category repositories are built
    once per (provider, label set) and reused across evaluation sets.
    """

    def __init__(self, taxonomy: Taxonomy, progress_chunk: int = PROGRESS_CHUNK) -> None:
        if progress_chunk <= 0:
            raise SelectionError("progress_chunk must be positive")
        self.taxonomy = taxonomy
        self.progress_chunk = progress_chunk
        self._repositories: Dict[Tuple[str, Tuple[IsicCode, ...]], CategoryRepository] = {}

    def _check(self, eval_set: Dataset) -> None:
        if not eval_set.examples:
            raise SelectionError("empty evaluation set")
        for label in eval_set.labels:
            if level_of(label) is not Level.DIVISION:
                raise SelectionError(f"evaluation label {label!r} is not a division code")
        missing = sorted({label for label in eval_set.labels if label not in self.taxonomy})
        if missing:
            raise SelectionError(f"labels missing from taxonomy: {missing}")

    def _repository(self, provider: EmbeddingProvider, labels: Tuple[IsicCode, ...]) -> CategoryRepository:
        key = (provider.provider_id, labels)
        if key not in self._repositories:
            self._repositories[key] = build_category_repository(self.taxonomy, labels, provider)
        return self._repositories[key]

    def evaluate(self, provider: EmbeddingProvider, eval_set: Dataset) -> ProviderScore:
        self._check(eval_set)
        pid = provider.provider_id
        repository = self._repository(provider, tuple(label_space(eval_set).labels))
        texts = eval_set.texts
        predictions: List[str] = []
        for start in range(0, len(texts), self.progress_chunk):
            chunk = texts[start:start + self.progress_chunk]
            try:
                vectors = embed_many(provider, chunk)
            except ProviderError as e:
                raise SelectionError(
                    f"provider {pid!r} failed after {len(predictions)} of {len(texts)} examples: {e}"
                ) from e
            predictions.extend(nearest_category(repository, v)[0] for v in vectors)

        score = ProviderScore(
            provider_id=pid,
            accuracy=accuracy(eval_set.labels, predictions),
            evaluated_count=len(predictions),
        )
        logger.info("phase1 provider=%s accuracy=%.4f n=%d", pid, score.accuracy, score.evaluated_count)
        return score

    def select(self, providers: Sequence[EmbeddingProvider], eval_set: Dataset) -> SelectionReport:
        if not providers:
            raise SelectionError("empty provider list")
        report = rank_scores([self.evaluate(p, eval_set) for p in providers])
        logger.info("phase1 winner=%s", report.winner)
        return report


def evaluate_provider(provider: EmbeddingProvider, taxonomy: Taxonomy, eval_set: Dataset) -> ProviderScore:
    return SelectionService(taxonomy).evaluate(provider, eval_set)


def select_model(providers: Sequence[EmbeddingProvider], taxonomy: Taxonomy, eval_set: Dataset) -> SelectionReport:
    return SelectionService(taxonomy).select(providers, eval_set)


def rank_scores(scores: Sequence[ProviderScore]) -> SelectionReport:
    if not scores:
        raise SelectionError("no providers to select from")
    ids = [s.provider_id for s in scores]
    if len(set(ids)) != len(ids):
        raise SelectionError(f"duplicate provider ids: {ids}")
    ordered = sorted(scores, key=lambda s: (-s.accuracy, s.provider_id))
    return SelectionReport(scores=ordered, winner=ordered[0].provider_id)


def render_selection_table(report: SelectionReport) -> str:
    """Two columns: model id and accuracy as a percentage with 2 decimals."""
    rows = [(s.provider_id, f"{s.accuracy * 100:.2f}%") for s in report.scores]
    width = max([len("Models")] + [len(name) for name, _ in rows])
    lines = [f"{'Models'.ljust(width)}  Accuracy"]
    lines += [f"{name.ljust(width)}  {acc}" for name, acc in rows]
    return "\n".join(lines)
