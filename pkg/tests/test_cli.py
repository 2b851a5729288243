"""
Tests for the isic-engine command line.
"""
import json
from pathlib import Path

import pytest

from app.cli import cli
from app.repositories.bundle_repo import BUNDLE_FILES
from tests.conftest import BRANCH_CSV, DATA_DIR, SAMPLE_TAXONOMY_CSV, TOY_ACTIVITIES


@pytest.fixture
def toy_csv(tmp_path):
    path = tmp_path / "activities.csv"
    path.write_text(TOY_ACTIVITIES, encoding="utf-8")
    return path


@pytest.fixture
def trained(tmp_path, toy_csv):
    out = tmp_path / "bundle"
    code = cli(
        [
            "train",
            "--taxonomy", str(SAMPLE_TAXONOMY_CSV),
            "--data", str(toy_csv),
            "--provider", "hashing:64",
            "--output", str(out),
            "--epochs", "100",
            "--learning-rate", "0.05",
        ]
    )
    assert code == 0
    return out


class TestTaxonomyValidate:
    """taxonomy validate --file."""

    def test_demolition_branch(self, capsys):
        """Test validating the four-row branch."""
        assert cli(["taxonomy", "validate", "--file", str(BRANCH_CSV)]) == 0
        assert capsys.readouterr().out.strip() == "4 nodes, 0 errors"

    def test_invalid(self, tmp_path, capsys):
        """Test that an invalid table exits 1."""
        bad = tmp_path / "bad.csv"
        bad.write_text("level,code,parent,description\ndivision,43,F,Orphan\n", encoding="utf-8")
        assert cli(["taxonomy", "validate", "--file", str(bad)]) == 1
        captured = capsys.readouterr()
        assert captured.out.strip() == "0 nodes, 1 errors"
        assert "orphan parent" in captured.err


class TestUsage:
    """argparse errors exit with 2."""

    def test_unknown_subcommand(self, capsys):
        """Test that an unknown subcommand exits 2."""
        assert cli(["frobnicate"]) == 2
        assert "usage" in capsys.readouterr().err

    def test_unknown_flag(self):
        """Test that an unknown flag exits 2."""
        assert cli(["ingest", "--data", "x.csv", "--colour", "red"]) == 2

    def test_run_needs_config(self):
        """Test that run without --config exits 2."""
        assert cli(["run"]) == 2


class TestIngestAndPhase1:
    """Dataset summary and provider selection."""

    def test_ingest(self, toy_csv, capsys):
        """Test the ingest summary line."""
        assert cli(["ingest", "--data", str(toy_csv), "--taxonomy", str(SAMPLE_TAXONOMY_CSV)]) == 0
        assert capsys.readouterr().out.strip() == "21 examples, 4 classes, 3 divisions"

    def test_ingest_missing_file(self, tmp_path):
        """Test that a missing corpus exits 1."""
        assert cli(["ingest", "--data", str(tmp_path / "missing.csv")]) == 1

    def test_phase1_eval(self, tmp_path, toy_csv, capsys):
        """Test the selection table and the written report."""
        code = cli(
            [
                "--output", str(tmp_path / "p1"),
                "phase1-eval",
                "--taxonomy", str(SAMPLE_TAXONOMY_CSV),
                "--data", str(toy_csv),
                "--provider", "hashing:8",
                "--provider", "hashing:64",
            ]
        )
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0].split() == ["Models", "Accuracy"]
        assert len(lines) == 3
        report = json.loads((tmp_path / "p1" / "selection_report.json").read_text(encoding="utf-8"))
        assert report["winner"] == lines[1].split()[0]


class TestTrainClassifyEvaluate:
    """Bundle lifecycle through the CLI."""

    def test_train_writes_bundle(self, trained):
        """Test that train writes every bundle file."""
        for name in BUNDLE_FILES:
            assert (trained / name).is_file()

    def test_classify_top3(self, trained, capsys):
        """Test printing the top three classes."""
        capsys.readouterr()
        assert cli(["classify", "--bundle", str(trained), "--text", "demolition of buildings", "--top", "3"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 3
        assert lines[0].startswith("1. 4311  ")
        assert lines[0].endswith("Demolition")

    def test_evaluate(self, trained, toy_csv, capsys):
        """Test the four-column evaluation table."""
        capsys.readouterr()
        assert cli(["evaluate", "--bundle", str(trained), "--data", str(toy_csv)]) == 0
        header, row = capsys.readouterr().out.strip().splitlines()
        assert header == "Accuracy  Precision weighted  Recall weighted  F1 weighted"
        assert len(row.split()) == 4
        assert all(cell.endswith("%") for cell in row.split())

    def test_zero_test_fraction_is_rejected(self, tmp_path, toy_csv):
        """Test that an explicit --test-fraction 0 is refused instead of falling back to the default."""
        out = tmp_path / "zero"
        argv = [
            "train",
            "--taxonomy", str(SAMPLE_TAXONOMY_CSV),
            "--data", str(toy_csv),
            "--provider", "hashing:64",
            "--output", str(out),
            "--test-fraction", "0",
        ]
        assert cli(argv) == 1
        assert not (out / "weights.json").exists()

    def test_evaluate_missing_bundle(self, tmp_path, toy_csv):
        """Test that a missing bundle exits 1."""
        assert cli(["evaluate", "--bundle", str(tmp_path / "none"), "--data", str(toy_csv)]) == 1


class TestRun:
    """Full pipeline from a config file."""

    def test_run_sample_config(self, tmp_path, capsys):
        """Test running the bundled sample config."""
        out = tmp_path / "run"
        assert cli(["run", "--config", str(DATA_DIR / "pipeline_sample.toml"), "--output", str(out)]) == 0
        assert (out / "weights.json").is_file()
        text = capsys.readouterr().out
        assert "Models" in text and "F1 weighted" in text

    def test_runs_are_byte_identical(self, tmp_path):
        """Test that two runs write identical bundles."""
        out = tmp_path / "run"
        args = ["run", "--config", str(DATA_DIR / "pipeline_sample.toml"), "--output", str(out), "--seed", "3"]
        assert cli(args) == 0
        first = {name: (out / name).read_bytes() for name in BUNDLE_FILES}
        assert cli(args) == 0
        assert {name: (out / name).read_bytes() for name in BUNDLE_FILES} == first

    def test_nothing_written_outside_output(self, tmp_path):
        """Test that a run only writes under its output directory."""
        out = tmp_path / "run"
        cli(["run", "--config", str(DATA_DIR / "pipeline_sample.toml"), "--output", str(out)])
        assert [p.name for p in tmp_path.iterdir()] == ["run"]
        assert not (Path(DATA_DIR) / "cache").exists()
