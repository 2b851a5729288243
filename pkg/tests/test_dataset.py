"""
Tests for corpus ingestion, label space, division coarsening and splits.
"""
from collections import Counter

import pytest

from app.core.errors import DatasetError
from app.models.dataset import Dataset, LabeledExample
from app.services.dataset_service import (
    coarsen_to_division,
    label_space,
    load_dataset,
    load_examples,
    split_indices,
    stratified_split,
    subset,
    write_examples,
)
from tests.conftest import DATA_DIR, TOY_ACTIVITIES


def _dataset(counts):
    """Dataset with `count` examples per label, labels interleaved."""
    examples = []
    for label, count in counts.items():
        examples.extend(LabeledExample(activity_name=f"{label} activity {i}", label=label) for i in range(count))
    return Dataset(examples=tuple(examples))


class TestLoadExamples:
    """CSV ingestion."""

    def test_toy_corpus(self):
        """Test loading the toy corpus."""
        dataset = load_examples(TOY_ACTIVITIES)
        assert dataset.row_count == 21
        assert dataset.examples[0] == LabeledExample(activity_name="demolition of buildings", label="4311")

    def test_sample_corpus(self):
        """Test loading the bundled sample corpus."""
        dataset = load_dataset(DATA_DIR / "activities_sample.csv")
        assert len(dataset) > 50
        assert dataset.source.endswith("activities_sample.csv")

    def test_leading_zero_kept(self):
        """Test that codes keep their leading zeros."""
        dataset = load_examples("activity_name,isic_class\nwheat grain production,0111\n")
        assert dataset.labels == ["0111"]

    def test_missing_header(self):
        """Test that a file without the header is rejected."""
        with pytest.raises(DatasetError, match="missing header"):
            load_examples("demolition of buildings,4311\n")

    def test_empty_name(self):
        """Test that an empty activity name is rejected."""
        with pytest.raises(DatasetError, match="empty activity name at row 2"):
            load_examples("activity_name,isic_class\ndemolition,4311\n  ,4311\n")

    def test_malformed_code(self):
        """Test that a malformed class code is rejected."""
        with pytest.raises(DatasetError, match="malformed ISIC code"):
            load_examples("activity_name,isic_class\ndemolition,43-11\n")

    def test_write_then_load(self):
        """Test writing examples and loading them back."""
        dataset = load_examples(TOY_ACTIVITIES)
        assert load_examples(write_examples(dataset)).examples == dataset.examples


class TestLabelSpace:
    """Sorted labels with their supports."""

    def test_sorted_with_supports(self):
        """Test label order and per-label support."""
        space = label_space(load_examples(TOY_ACTIVITIES))
        assert space.labels == ("4100", "4311", "4312", "4923")
        assert space.supports == (5, 6, 5, 5)
        assert space.index()["4311"] == 1

    def test_empty(self):
        """Test the label space of an empty dataset."""
        with pytest.raises(DatasetError, match="empty dataset"):
            label_space(Dataset(examples=()))


class TestCoarsenToDivision:
    """Class labels map to their two-digit division."""

    def test_maps_labels_keeps_texts(self):
        """Test mapping classes to divisions."""
        dataset = load_examples(TOY_ACTIVITIES)
        coarse = coarsen_to_division(dataset)
        assert coarse.texts == dataset.texts
        assert label_space(coarse).labels == ("41", "43", "49")

    def test_group_labels(self):
        """Test mapping groups to divisions."""
        dataset = load_examples("activity_name,isic_class\nsite works,431\n")
        assert coarsen_to_division(dataset).labels == ["43"]

    def test_rejects_division_label(self):
        """Test that labels already at division level are rejected."""
        dataset = load_examples("activity_name,isic_class\nsite works,43\n")
        with pytest.raises(DatasetError):
            coarsen_to_division(dataset)


class TestStratifiedSplit:
    """Per-label floor(s * fraction) test examples, seeded."""

    def test_per_label_counts(self):
        """Test floor(s * fraction) test rows per label."""
        dataset = _dataset({"4311": 10, "4312": 7, "4100": 5, "4923": 1})
        split = split_indices(dataset, 0.2, seed=0)
        test_counts = Counter(dataset.examples[i].label for i in split.test_indices)
        assert test_counts == {"4311": 2, "4312": 1, "4100": 1}

    def test_floor_is_exact_at_representation_edges(self):
        """Test floor at fractions that do not round cleanly."""
        dataset = _dataset({"4311": 100})
        split = split_indices(dataset, 0.29, seed=0)
        assert len(split.test_indices) == 29

    def test_singleton_stays_in_train(self):
        """Test that a single-example label stays in train."""
        dataset = _dataset({"4311": 1, "4312": 4})
        split = split_indices(dataset, 0.5, seed=3)
        singleton = next(i for i, e in enumerate(dataset.examples) if e.label == "4311")
        assert singleton in split.train_indices

    def test_test_never_takes_every_example(self):
        """Test that every label keeps a training example."""
        dataset = _dataset({"4311": 2})
        split = split_indices(dataset, 0.9, seed=0)
        assert len(split.train_indices) == 1
        assert len(split.test_indices) == 1

    def test_partition(self):
        """Test that train and test partition the indices."""
        dataset = _dataset({"4311": 13, "4312": 8, "4100": 3})
        split = split_indices(dataset, 0.3, seed=11)
        assert sorted(split.train_indices + split.test_indices) == list(range(len(dataset)))
        assert list(split.train_indices) == sorted(split.train_indices)
        train_labels = {dataset.examples[i].label for i in split.train_indices}
        assert {dataset.examples[i].label for i in split.test_indices} <= train_labels

    def test_same_seed_same_split(self):
        """Test that a seed fixes the split."""
        dataset = _dataset({"4311": 20, "4312": 20})
        assert split_indices(dataset, 0.2, seed=5) == split_indices(dataset, 0.2, seed=5)

    def test_different_seed_different_split(self):
        """Test that another seed changes the split."""
        dataset = _dataset({"4311": 40, "4312": 40})
        assert split_indices(dataset, 0.2, seed=1).test_indices != split_indices(dataset, 0.2, seed=2).test_indices

    def test_subsets_keep_ingestion_order(self):
        """Test that subsets keep file order."""
        dataset = _dataset({"4311": 10, "4312": 10})
        train, test = stratified_split(dataset, 0.2, seed=0)
        split = split_indices(dataset, 0.2, seed=0)
        assert train == subset(dataset, split.train_indices)
        assert len(train) == 16
        assert len(test) == 4

    @pytest.mark.parametrize("fraction", [0.0, 1.0, -0.1, 1.5])
    def test_fraction_out_of_range(self, fraction):
        """Test that fractions outside (0, 1) are rejected."""
        with pytest.raises(DatasetError):
            split_indices(_dataset({"4311": 5}), fraction, seed=0)
