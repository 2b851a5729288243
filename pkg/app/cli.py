"""
Command-line entry point.

  isic-engine taxonomy validate --file t.csv
  isic-engine ingest --data d.csv [--taxonomy t.csv]
  isic-engine phase1-eval --taxonomy t.csv --data d.csv --provider hashing:64 [--provider id=http://...]
  isic-engine train --taxonomy t.csv --data d.csv --provider hashing:64 --output out/
  isic-engine evaluate --bundle out/ --data test.csv
  isic-engine classify --bundle out/ --text "demolition of buildings" --top 3
  isic-engine serve --bundle out/ [--host 127.0.0.1 --port 8000]
  isic-engine run --config pipeline.toml [--seed 7 --output out/]

Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional, Sequence

from app.adapters.embedding_providers.factory import build_provider
from app.core.errors import IsicEngineError
from app.core.logging import configure_logging
from app.evaluation.metrics import render_report_table
from app.models.embedding import ProviderDescriptor
from app.models.head import TrainConfig
from app.models.pipeline import PipelineConfig
from app.repositories.bundle_repo import load_bundle, write_selection_report
from app.services.classify_service import predict
from app.services.dataset_service import DEFAULT_TEST_FRACTION, coarsen_to_division, label_space, load_dataset
from app.services.pipeline_service import evaluate_bundle, load_pipeline_config, provider_for_bundle, run_pipeline
from app.services.selection_service import render_selection_table, select_model
from app.services.taxonomy_service import describe, load_taxonomy


def _provider(value: str) -> ProviderDescriptor:
    """`hashing:<d>` or `<id>=<http endpoint>`."""
    if "=" in value:
        pid, endpoint = value.split("=", 1)
        return ProviderDescriptor(id=pid, endpoint=endpoint)
    return ProviderDescriptor(endpoint=value)


def _add_global_flags(parser: argparse.ArgumentParser, *, suppress: bool) -> None:
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--config", default=default, help="pipeline config (.toml or .json)")
    parser.add_argument("--seed", type=int, default=default, help="split/shuffle seed override")
    parser.add_argument("--output", default=default, help="output directory; nothing is written elsewhere")
    parser.add_argument("--log-level", default=default)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isic-engine", description="ISIC activity classification engine")
    _add_global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _add_global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    tax = sub.add_parser("taxonomy", parents=[common], help="taxonomy utilities")
    tax_sub = tax.add_subparsers(dest="action", required=True)
    validate = tax_sub.add_parser("validate", parents=[common], help="parse and validate a taxonomy CSV")
    validate.add_argument("--file", required=True)

    ingest = sub.add_parser("ingest", parents=[common], help="load a dataset and summarise its label space")
    ingest.add_argument("--data", required=True)
    ingest.add_argument("--taxonomy")

    p1 = sub.add_parser("phase1-eval", parents=[common], help="score providers by nearest-division accuracy")
    p1.add_argument("--taxonomy", required=True)
    p1.add_argument("--data", required=True)
    p1.add_argument("--provider", action="append", type=_provider, required=True)

    train = sub.add_parser("train", parents=[common], help="select a provider and train the head")
    train.add_argument("--taxonomy")
    train.add_argument("--data")
    train.add_argument("--provider", action="append", type=_provider)
    train.add_argument("--test-fraction", type=float)
    train.add_argument("--epochs", type=int)
    train.add_argument("--learning-rate", type=float)
    train.add_argument("--batch-size", type=int)

    ev = sub.add_parser("evaluate", parents=[common], help="evaluate a bundle on a labeled CSV")
    ev.add_argument("--bundle", required=True)
    ev.add_argument("--data", required=True)

    cl = sub.add_parser("classify", parents=[common], help="rank ISIC classes for a text")
    cl.add_argument("--bundle", required=True)
    cl.add_argument("--text", required=True)
    cl.add_argument("--top", type=int, default=5)

    sv = sub.add_parser("serve", parents=[common], help="serve the HTTP classification API")
    sv.add_argument("--bundle", required=True)
    sv.add_argument("--host", default="127.0.0.1")
    sv.add_argument("--port", type=int, default=8000)

    sub.add_parser("run", parents=[common], help="full pipeline from --config")
    return parser


def _cmd_taxonomy(args: argparse.Namespace) -> int:
    try:
        taxonomy = load_taxonomy(args.file)
    except (IsicEngineError, OSError) as e:
        print("0 nodes, 1 errors")
        print(f"error: {e}", file=sys.stderr)
        return 1
    print(f"{len(taxonomy)} nodes, 0 errors")
    return 0


def _cmd_ingest(args: argparse.Namespace) -> int:
    dataset = load_dataset(args.data)
    classes = label_space(dataset)
    divisions = label_space(coarsen_to_division(dataset))
    print(f"{len(dataset)} examples, {len(classes)} classes, {len(divisions)} divisions")
    if args.taxonomy:
        taxonomy = load_taxonomy(args.taxonomy)
        missing = [c for c in classes.labels + divisions.labels if c not in taxonomy]
        if missing:
            print(f"error: labels missing from taxonomy: {missing}", file=sys.stderr)
            return 1
    return 0


def _cmd_phase1(args: argparse.Namespace) -> int:
    taxonomy = load_taxonomy(args.taxonomy)
    coarse = coarsen_to_division(load_dataset(args.data))
    report = select_model([build_provider(d) for d in args.provider], taxonomy, coarse)
    print(render_selection_table(report))
    if args.output:
        write_selection_report(report, args.output)
    return 0


def _train_config(args: argparse.Namespace) -> PipelineConfig:
    base = load_pipeline_config(args.config).model_dump() if args.config else {}
    train = dict(base.get("train") or TrainConfig().model_dump())
    for flag, key in (("epochs", "epochs"), ("learning_rate", "learning_rate"), ("batch_size", "batch_size")):
        if getattr(args, flag) is not None:
            train[key] = getattr(args, flag)
    merged = {
        **base,
        "taxonomy_path": args.taxonomy or base.get("taxonomy_path"),
        "dataset_path": args.data or base.get("dataset_path"),
        "providers": args.provider or base.get("providers"),
        "test_fraction": (
            args.test_fraction if args.test_fraction is not None else base.get("test_fraction", DEFAULT_TEST_FRACTION)
        ),
        "seed": args.seed if args.seed is not None else base.get("seed", 0),
        "output_dir": args.output or base.get("output_dir"),
        "train": train,
    }
    return PipelineConfig.model_validate(merged)


def _summarise(bundle) -> None:
    print(render_selection_table(bundle.selection))
    print()
    print(render_report_table(bundle.evaluation))


def _cmd_train(args: argparse.Namespace) -> int:
    _summarise(run_pipeline(_train_config(args)))
    return 0


def _cmd_run(args: argparse.Namespace) -> int:
    if not args.config:
        print("error: run needs --config", file=sys.stderr)
        return 2
    config = load_pipeline_config(args.config, seed=args.seed, output_dir=args.output)
    _summarise(run_pipeline(config))
    return 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    bundle = load_bundle(args.bundle)
    print(render_report_table(evaluate_bundle(bundle, args.data)))
    return 0


def _cmd_classify(args: argparse.Namespace) -> int:
    bundle = load_bundle(args.bundle)
    ranking = predict(bundle.weights, provider_for_bundle(bundle), args.text, args.top)
    for i, (code, p) in enumerate(ranking, start=1):
        print(f"{i}. {code}  {p:.4f}  {describe(bundle.taxonomy, code)}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    from app.main import serve

    try:
        serve(args.bundle, host=args.host, port=args.port)
    except OSError as e:
        print(f"error: cannot bind {args.host}:{args.port}: {e}", file=sys.stderr)
        return 1
    except SystemExit as e:
        # uvicorn exits on startup failures such as an address already in use
        return 1 if e.code else 0
    return 0


_COMMANDS = {
    "taxonomy": _cmd_taxonomy,
    "ingest": _cmd_ingest,
    "phase1-eval": _cmd_phase1,
    "train": _cmd_train,
    "evaluate": _cmd_evaluate,
    "classify": _cmd_classify,
    "serve": _cmd_serve,
    "run": _cmd_run,
}


def cli(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    configure_logging(args.log_level)
    try:
        return _COMMANDS[args.command](args)
    except (IsicEngineError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def main(argv: Optional[List[str]] = None) -> None:
    sys.exit(cli(argv))


if __name__ == "__main__":
    main()
