"""
On-disk model bundle: one directory, one JSON file per artefact.

JSON is written with sorted keys, 2-space indent and a trailing newline;
floats use repr precision. Identical runs therefore produce identical bytes.
"""

from __future__ import annotations

import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
from pydantic import ValidationError

from app.core.errors import BundleError, TaxonomyError, TrainingError
from app.models.dataset import SplitIndices
from app.models.head import HeadWeights, TrainConfig, TrainHistory
from app.models.metrics import EvaluationReport
from app.models.pipeline import ModelBundle, PipelineConfig
from app.models.selection import SelectionReport
from app.services.taxonomy_service import parse_taxonomy, serialize_taxonomy

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

WEIGHTS_FILE = "weights.json"
SELECTION_FILE = "selection_report.json"
EVALUATION_FILE = "evaluation_report.json"
CONFIG_FILE = "pipeline_config.json"
TAXONOMY_FILE = "taxonomy.csv"
SPLIT_FILE = "split.json"
HISTORY_FILE = "history.json"

BUNDLE_FILES = (
    WEIGHTS_FILE, SELECTION_FILE, EVALUATION_FILE, CONFIG_FILE, TAXONOMY_FILE, SPLIT_FILE, HISTORY_FILE,
)


def dump_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def weights_to_dict(
    weights: HeadWeights,
    train_config: Optional[TrainConfig] = None,
    metrics: Optional[Dict[str, float]] = None,
) -> Dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "provider_id": weights.provider_id,
        "dim": weights.dim,
        "labels": list(weights.labels),
        "W": weights.W.tolist(),
        "b": weights.b.tolist(),
        "train_config": train_config.model_dump() if train_config else {},
        "metrics": metrics or {},
    }


def weights_from_dict(data: Dict[str, Any]) -> HeadWeights:
    if data.get("schema_version") != SCHEMA_VERSION:
        raise BundleError(f"unsupported weights schema_version {data.get('schema_version')!r}")
    try:
        labels = tuple(data["labels"])
        dim = int(data["dim"])
        W = np.asarray(data["W"], dtype=np.float64)
        b = np.asarray(data["b"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as e:
        raise BundleError(f"malformed weights file: {e}") from e
    if W.shape != (len(labels), dim):
        raise BundleError(f"W has shape {W.shape}, expected ({len(labels)}, {dim})")
    try:
        return HeadWeights(labels=labels, W=W, b=b, provider_id=str(data.get("provider_id", "")))
    except TrainingError as e:
        raise BundleError(str(e)) from e


def headline_metrics(report: EvaluationReport, history: TrainHistory) -> Dict[str, float]:
    metrics = {
        "accuracy": report.accuracy,
        "precision_weighted": report.precision_weighted,
        "recall_weighted": report.recall_weighted,
        "f1_weighted": report.f1_weighted,
    }
    if history.epoch_losses:
        metrics["final_train_loss"] = history.epoch_losses[-1]
    return metrics


def bundle_files(bundle: ModelBundle) -> Dict[str, str]:
    """File name -> text content, exactly as written to disk."""
    return {
        WEIGHTS_FILE: dump_json(
            weights_to_dict(bundle.weights, bundle.config.train, headline_metrics(bundle.evaluation, bundle.history))
        ),
        SELECTION_FILE: dump_json(bundle.selection.model_dump()),
        EVALUATION_FILE: dump_json(bundle.evaluation.model_dump()),
        CONFIG_FILE: dump_json(bundle.config.model_dump(mode="json")),
        TAXONOMY_FILE: serialize_taxonomy(bundle.taxonomy),
        SPLIT_FILE: dump_json(bundle.split.model_dump()),
        HISTORY_FILE: dump_json(bundle.history.model_dump()),
    }


def version_of(weights_text: str) -> str:
    return hashlib.sha256(weights_text.encode("utf-8")).hexdigest()[:12]


def save_bundle(bundle: ModelBundle, directory: str | Path) -> Path:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in bundle_files(bundle).items():
        (out / name).write_text(text, encoding="utf-8")
    logger.info("bundle written to %s", out)
    return out


def _read_json(path: Path) -> Any:
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise BundleError(f"bundle file missing: {path}") from None
    except json.JSONDecodeError as e:
        raise BundleError(f"bundle file {path} is not valid JSON: {e}") from e


def write_selection_report(report: SelectionReport, directory: str | Path) -> Path:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    path = out / SELECTION_FILE
    path.write_text(dump_json(report.model_dump()), encoding="utf-8")
    return path


def read_selection_report(path: str | Path) -> SelectionReport:
    try:
        return SelectionReport.model_validate(_read_json(Path(path)))
    except ValidationError as e:
        raise BundleError(f"invalid selection report {path}: {e}") from e


def load_bundle(directory: str | Path) -> ModelBundle:
    root = Path(directory)
    if not root.is_dir():
        raise BundleError(f"bundle directory not found: {root}")
    weights_path = root / WEIGHTS_FILE
    weights = weights_from_dict(_read_json(weights_path))
    try:
        config = PipelineConfig.model_validate(_read_json(root / CONFIG_FILE))
        selection = SelectionReport.model_validate(_read_json(root / SELECTION_FILE))
        evaluation = EvaluationReport.model_validate(_read_json(root / EVALUATION_FILE))
        split = SplitIndices.model_validate(_read_json(root / SPLIT_FILE))
        history = TrainHistory.model_validate(_read_json(root / HISTORY_FILE))
        taxonomy = parse_taxonomy(
            (root / TAXONOMY_FILE).read_text(encoding="utf-8"), revision=config.taxonomy_revision
        )
    except ValidationError as e:
        raise BundleError(f"invalid bundle in {root}: {e}") from e
    except (TaxonomyError, FileNotFoundError) as e:
        raise BundleError(f"invalid bundle taxonomy in {root}: {e}") from e

    if weights.provider_id != selection.winner:
        raise BundleError(f"weights provider {weights.provider_id!r} is not the selected {selection.winner!r}")
    missing = [label for label in weights.labels if label not in taxonomy]
    if missing:
        raise BundleError(f"bundle labels missing from its taxonomy: {missing}")

    return ModelBundle(
        weights=weights,
        selection=selection,
        evaluation=evaluation,
        config=config,
        taxonomy=taxonomy,
        split=split,
        history=history,
        version=version_of(weights_path.read_text(encoding="utf-8")),
    )
