"""
End-to-end run:
  parse_taxonomy -> load_examples -> coarsen_to_division -> select_model
  -> stratified_split -> embed -> train_head -> evaluate -> persist

Each stage logs `stage=<name>` with counts. A failing stage aborts the run;
whatever was produced so far lands in <output>/failed/ with error.json.
"""

from __future__ import annotations

import json
import logging
import sys
from contextlib import contextmanager
from dataclasses import replace
from pathlib import Path
from typing import Callable, Dict, Iterator, List, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - Python 3.10 fallback (same API)
    import tomli as tomllib

from app.adapters.embedding_providers.base import EmbeddingProvider, embed_many
from app.adapters.embedding_providers.cached_provider import EmbeddingCache
from app.adapters.embedding_providers.factory import build_provider
from app.core.config import settings
from app.core.errors import BundleError, DatasetError, PipelineError
from app.evaluation.metrics import classification_report
from app.models.embedding import ProviderDescriptor
from app.models.metrics import EvaluationReport
from app.models.pipeline import ModelBundle, PipelineConfig
from app.repositories.bundle_repo import (
    CONFIG_FILE, SELECTION_FILE, SPLIT_FILE, bundle_files, dump_json, save_bundle, version_of, WEIGHTS_FILE,
)
from app.services.classify_service import predict
from app.services.dataset_service import coarsen_to_division, label_space, load_dataset, split_indices, subset
from app.services.selection_service import SelectionService
from app.services.taxonomy_service import load_taxonomy
from app.training.softmax_head import predict_label
from app.training.trainer import train_head

logger = logging.getLogger(__name__)

ProviderFactory = Callable[[ProviderDescriptor, Optional[EmbeddingCache]], EmbeddingProvider]


def load_pipeline_config(path: str | Path, **overrides: object) -> PipelineConfig:
    """
    TOML or JSON by suffix. Relative paths resolve against the config file's
    directory. `overrides` (e.g. seed, output_dir) replace file values.
    """
    p = Path(path)
    text = p.read_text(encoding="utf-8")
    if p.suffix == ".toml":
        raw = tomllib.loads(text)
    elif p.suffix == ".json":
        raw = json.loads(text)
    else:
        raise ValueError(f"config must be .toml or .json, got {p.name}")
    raw.update({k: v for k, v in overrides.items() if v is not None})
    for key in ("taxonomy_path", "dataset_path", "output_dir"):
        value = raw.get(key)
        if isinstance(value, str) and value and not Path(value).is_absolute():
            raw[key] = str((p.parent / value).resolve())
    return PipelineConfig.model_validate(raw)


def cache_path(config: PipelineConfig) -> Path:
    return settings.ISIC_ENGINE_CACHE or Path(config.output_dir) / "cache" / "embeddings.jsonl"


class _Run:
    """Tracks partial outputs so a failure can dump them."""

    def __init__(self, config: PipelineConfig) -> None:
        self.config = config
        self.partial: Dict[str, str] = {CONFIG_FILE: dump_json(config.model_dump(mode="json"))}

    @contextmanager
    def stage(self, name: str) -> Iterator[None]:
        logger.info("stage=%s start", name)
        try:
            yield
        except Exception as e:
            self._dump_failure(name, e)
            raise PipelineError(name, e) from e
        logger.info("stage=%s done", name)

    def _dump_failure(self, stage: str, error: Exception) -> None:
        failed = Path(self.config.output_dir) / "failed"
        failed.mkdir(parents=True, exist_ok=True)
        for name, text in self.partial.items():
            (failed / name).write_text(text, encoding="utf-8")
        (failed / "error.json").write_text(dump_json({"stage": stage, "error": str(error)}), encoding="utf-8")
        logger.error("stage=%s failed: %s (partial outputs in %s)", stage, error, failed)


class PipelineService:
    """
    Runs the pipeline and re-evaluates bundles. `provider_factory` turns a
    descriptor into a provider; tests inject one to simulate outages.
    """

    def __init__(self, provider_factory: ProviderFactory = build_provider) -> None:
        self.provider_factory = provider_factory

    def run(self, config: PipelineConfig) -> ModelBundle:
        run = _Run(config)
        cache = EmbeddingCache(cache_path(config))

        with run.stage("parse_taxonomy"):
            taxonomy = load_taxonomy(config.taxonomy_path, revision=config.taxonomy_revision)
            logger.info("stage=parse_taxonomy nodes=%d", len(taxonomy))

        with run.stage("load_examples"):
            dataset = load_dataset(config.dataset_path)
            missing = sorted({label for label in dataset.labels if label not in taxonomy})
            if missing:
                raise DatasetError(f"dataset labels missing from taxonomy: {missing}")
            classes = label_space(dataset)
            logger.info("stage=load_examples examples=%d labels=%d", len(dataset), len(classes))

        with run.stage("coarsen_to_division"):
            coarse = coarsen_to_division(dataset)
            logger.info("stage=coarsen_to_division divisions=%d", len(label_space(coarse)))

        with run.stage("select_model"):
            providers = [self.provider_factory(d, cache) for d in config.providers]
            phase1_set = coarse
            if config.phase1_scope == "train":
                # the split is a pure function of (dataset, fraction, seed); the
                # stratified_split stage recomputes the same partition
                phase1_set = subset(coarse, split_indices(dataset, config.test_fraction, config.seed).train_indices)
            selection = SelectionService(taxonomy).select(providers, phase1_set)
            run.partial[SELECTION_FILE] = dump_json(selection.model_dump())
            winner = next(p for p in providers if p.provider_id == selection.winner)

        with run.stage("stratified_split"):
            split = split_indices(dataset, config.test_fraction, config.seed)
            train_set, test_set = subset(dataset, split.train_indices), subset(dataset, split.test_indices)
            if not test_set.examples:
                raise DatasetError("test split is empty; every label has a single example")
            run.partial[SPLIT_FILE] = dump_json(split.model_dump())
            logger.info("stage=stratified_split train=%d test=%d", len(train_set), len(test_set))

        with run.stage("embed"):
            train_vecs = embed_many(winner, train_set.texts)
            test_vecs = embed_many(winner, test_set.texts)
            logger.info(
                "stage=embed provider=%s vectors=%d cache=%d",
                winner.provider_id, len(train_vecs) + len(test_vecs), len(cache),
            )

        with run.stage("train_head"):
            weights, history = train_head(
                list(zip(train_vecs, train_set.labels)),
                classes.labels,
                config.train,
                list(zip(test_vecs, test_set.labels)),
                provider_id=winner.provider_id,
            )
            logger.info("stage=train_head steps=%d final_loss=%.6f", len(history.step_losses), history.epoch_losses[-1])

        with run.stage("evaluate"):
            predictions = [predict_label(weights, v) for v in test_vecs]
            evaluation = classification_report(test_set.labels, predictions, classes.labels)
            logger.info("stage=evaluate n=%d accuracy=%.4f", evaluation.n, evaluation.accuracy)

        with run.stage("persist"):
            bundle = ModelBundle(
                weights=weights,
                selection=selection,
                evaluation=evaluation,
                config=config,
                taxonomy=taxonomy,
                split=split,
                history=history,
            )
            files = bundle_files(bundle)
            run.partial.update(files)
            save_bundle(bundle, config.output_dir)
            bundle = replace(bundle, version=version_of(files[WEIGHTS_FILE]))

        return bundle

    def provider_for(self, bundle: ModelBundle, cache: Optional[EmbeddingCache] = None) -> EmbeddingProvider:
        for descriptor in bundle.config.providers:
            if descriptor.provider_id == bundle.weights.provider_id:
                return self.provider_factory(descriptor, cache)
        raise BundleError(f"no provider descriptor for {bundle.weights.provider_id!r} in bundle config")

    def evaluate(
        self,
        bundle: ModelBundle,
        dataset_path: str | Path,
        provider: Optional[EmbeddingProvider] = None,
    ) -> EvaluationReport:
        dataset = load_dataset(dataset_path)
        known = set(bundle.weights.labels)
        for label in dataset.labels:
            if label not in known:
                raise BundleError(f"unknown label {label!r}: not in the bundle's label set")
        provider = provider or self.provider_for(bundle)
        if provider.provider_id != bundle.weights.provider_id:
            raise BundleError(
                f"provider mismatch: dataset embedded with {provider.provider_id!r}, "
                f"bundle expects {bundle.weights.provider_id!r}"
            )
        predictions: List[str] = [predict(bundle.weights, provider, text, 1)[0][0] for text in dataset.texts]
        return classification_report(dataset.labels, predictions, bundle.weights.labels)


def run_pipeline(config: PipelineConfig, *, provider_factory: ProviderFactory = build_provider) -> ModelBundle:
    return PipelineService(provider_factory).run(config)


def provider_for_bundle(bundle: ModelBundle, cache: Optional[EmbeddingCache] = None) -> EmbeddingProvider:
    return PipelineService().provider_for(bundle, cache)


def evaluate_bundle(
    bundle: ModelBundle,
    dataset_path: str | Path,
    provider: Optional[EmbeddingProvider] = None,
) -> EvaluationReport:
    return PipelineService().evaluate(bundle, dataset_path, provider)
