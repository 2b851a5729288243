"""
Labeled activity corpus: CSV ingestion, label space, division coarsening,
and seeded stratified splitting.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from collections import Counter, defaultdict
from pathlib import Path
from typing import Dict, Iterable, List, Tuple

import numpy as np

from app.core.errors import DatasetError, TaxonomyError
from app.models.dataset import Dataset, LabeledExample, LabelSpace, SplitIndices
from app.models.taxonomy import Level, level_of
from app.services.taxonomy_service import division_of

logger = logging.getLogger(__name__)

DATASET_HEADER = ["activity_name", "isic_class"]
DEFAULT_TEST_FRACTION = 0.2


def load_examples(source: str, *, origin: str = "") -> Dataset:
    if source.startswith("\ufeff"):
        source = source[1:]
    rows = [r for r in csv.reader(io.StringIO(source)) if any(f.strip() for f in r)]
    if not rows or [h.strip().lower() for h in rows[0]] != DATASET_HEADER:
        raise DatasetError(f"missing header: expected {','.join(DATASET_HEADER)}")

    examples: List[LabeledExample] = []
    for n, row in enumerate(rows[1:], start=1):
        if len(row) != 2:
            raise DatasetError(f"row {n}: expected 2 fields, got {len(row)}")
        name, label = row[0].strip(), row[1].strip()
        if not name:
            raise DatasetError(f"empty activity name at row {n}")
        if level_of(label) is None:
            raise DatasetError(f"malformed ISIC code {label!r} at row {n}")
        examples.append(LabeledExample(activity_name=name, label=label))

    logger.info("loaded %d examples from %s", len(examples), origin or "<text>")
    return Dataset(examples=tuple(examples), source=origin)


def load_dataset(path: str | Path) -> Dataset:
    return load_examples(Path(path).read_text(encoding="utf-8"), origin=str(path))


def write_examples(dataset: Dataset) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(DATASET_HEADER)
    for e in dataset.examples:
        writer.writerow([e.activity_name, e.label])
    return buf.getvalue()


def label_space(dataset: Dataset) -> LabelSpace:
    if not dataset.examples:
        raise DatasetError("empty dataset")
    counts = Counter(dataset.labels)
    labels = tuple(sorted(counts))
    return LabelSpace(labels=labels, supports=tuple(counts[label] for label in labels))


def coarsen_to_division(dataset: Dataset) -> Dataset:
    coarse: List[LabeledExample] = []
    for n, e in enumerate(dataset.examples, start=1):
        if level_of(e.label) not in (Level.GROUP, Level.CLASS):
            raise DatasetError(f"row {n}: label {e.label!r} is not a group or class code")
        try:
            division = division_of(e.label)
        except TaxonomyError as exc:
            raise DatasetError(str(exc)) from exc
        coarse.append(LabeledExample(activity_name=e.activity_name, label=division))
    return Dataset(examples=tuple(coarse), source=dataset.source)


def subset(dataset: Dataset, indices: Iterable[int]) -> Dataset:
    return Dataset(examples=tuple(dataset.examples[i] for i in indices), source=dataset.source)


def split_indices(dataset: Dataset, test_fraction: float, seed: int) -> SplitIndices:
    """
    Per label, floor(s_k * test_fraction) examples go to test, picked by a
    seeded shuffle of that label's examples. Labels are visited in ascending
    code order from one generator, so the result depends only on
    (dataset, test_fraction, seed).
    """
    if not 0.0 < test_fraction < 1.0:
        raise DatasetError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    if not dataset.examples:
        raise DatasetError("empty dataset")

    by_label: Dict[str, List[int]] = defaultdict(list)
    for i, e in enumerate(dataset.examples):
        by_label[e.label].append(i)

    rng = np.random.default_rng(seed)
    train: List[int] = []
    test: List[int] = []
    for label in sorted(by_label):
        idxs = by_label[label]
        order = rng.permutation(len(idxs))
        n_test = 0
        if len(idxs) >= 2:
            # epsilon absorbs representation error such as 100 * 0.29 = 28.999...
            n_test = min(math.floor(len(idxs) * test_fraction + 1e-9), len(idxs) - 1)
        test.extend(idxs[j] for j in order[:n_test])
        train.extend(idxs[j] for j in order[n_test:])

    split = SplitIndices(
        seed=seed,
        test_fraction=test_fraction,
        train_indices=tuple(sorted(train)),
        test_indices=tuple(sorted(test)),
    )
    _assert_partition(dataset, split)
    return split


def stratified_split(dataset: Dataset, test_fraction: float, seed: int) -> Tuple[Dataset, Dataset]:
    split = split_indices(dataset, test_fraction, seed)
    return subset(dataset, split.train_indices), subset(dataset, split.test_indices)


def _assert_partition(dataset: Dataset, split: SplitIndices) -> None:
    train, test = set(split.train_indices), set(split.test_indices)
    assert not train & test and len(train) + len(test) == len(dataset)
    train_labels = {dataset.examples[i].label for i in train}
    missing = {dataset.examples[i].label for i in test} - train_labels
    assert not missing, f"test labels absent from train: {sorted(missing)}"
