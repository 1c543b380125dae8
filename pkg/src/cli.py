"""
Command-line interface.

Usage:
    rfd-multiview validate data/lsvt/manifest.yaml
    rfd-multiview train experiment.yaml --method sw_ka --output models/lsvt.joblib
    rfd-multiview predict models/lsvt.joblib data/new/manifest.yaml
    rfd-multiview bench experiment.yaml --seed 7 --threads 4
    rfd-multiview inspect models/lsvt.joblib --output-dir inspect/ --instances data/new/manifest.yaml

Exit codes: 0 success, 1 usage, 2 data validation, 3 runtime failure.
Failures print one line `error=<kind> reason="<message>"` on stderr.
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

import pandas as pd
from pydantic import ValidationError

from src.bench.protocol import accuracy, run_experiment
from src.bench.reporting import summary_lines, write_report
from src.config.constants import ALL_METHODS, EXIT_DATA, EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, METHOD_DCS_RFD
from src.config.settings import settings
from src.dcs.selection import DCSModel, dcs_predict_batch, load_dcs_model, save_dcs_model, train_dcs, write_transcript
from src.dissim.matrix import matrix_to_csv
from src.errors import DatasetValidationError, ExperimentError, ParameterError, RFDError, StratificationError
from src.ingestion.manifest import ManifestSource, load_dataset, load_instances
from src.models.experiment import DatasetManifest, ExperimentConfig
from src.multiview.model import MultiViewModel, load_model, save_model, train
from src.persistence import saved_kind

logger = logging.getLogger(__name__)

DATA_ERRORS = (DatasetValidationError, StratificationError)


class UsageError(Exception):
    pass


class CLIParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _fail(kind: str, message: str) -> None:
    reason = " ".join(str(message).split()).replace('"', "'")
    print(f'error={kind} reason="{reason}"', file=sys.stderr)


# ============================================================================
# Configuration overrides
# ============================================================================

def _overrides(args) -> dict:
    values = {
        "seed": getattr(args, "seed", None),
        "n_trees": getattr(args, "trees", None),
        "k": getattr(args, "k", None),
        "kappa": getattr(args, "kappa", None),
    }
    methods = getattr(args, "method", None)
    if methods:
        values["methods"] = [methods] if isinstance(methods, str) else methods
    return {key: value for key, value in values.items() if value is not None}


def _load_config(paths: Sequence[str], args) -> ExperimentConfig:
    """Merge config files (datasets of all, parameters of the first) and apply flags."""
    configs = [ExperimentConfig.from_yaml(Path(path)) for path in paths]
    merged = configs[0].model_dump()
    merged["manifests"] = [manifest for config in configs for manifest in config.manifests]
    merged.update(_overrides(args))
    try:
        return ExperimentConfig(**merged)
    except ValidationError as e:
        raise ParameterError(f"invalid option: {e}") from e


# ============================================================================
# Commands
# ============================================================================

def cmd_validate(args) -> int:
    manifest = DatasetManifest.from_yaml(Path(args.manifest))
    source = ManifestSource(manifest)
    dataset = source.run()
    problems = source.check_reference(dataset)

    print(f"✅ {dataset.name}: n={dataset.n}, Q={dataset.n_views}, C={dataset.n_classes}, "
          f"IR={dataset.imbalance_ratio():.2f}")
    for name, m in zip(dataset.view_names, dataset.dimensions):
        print(f"   {name}: {m} features")
    for problem in problems:
        print(f"⚠️  differs from the reference catalogue: {problem}")
    return EXIT_OK


def cmd_train(args) -> int:
    config = _load_config([args.config], args)
    method = config.methods[0]
    if len(config.methods) > 1:
        logger.info(f"Several methods configured, training the first: {method}")
    if not config.manifests:
        raise ParameterError("the config names no dataset manifest")
    dataset = load_dataset(config.manifests[0])

    if method == METHOD_DCS_RFD:
        model = train_dcs(
            dataset,
            n_trees=config.n_trees,
            seed=config.seed,
            k=config.k,
            kappa=config.kappa,
            final_n_trees=config.effective_final_n_trees,
            n_jobs=args.threads,
        )
        save = save_dcs_model
    else:
        model = train(
            dataset,
            n_trees=config.n_trees,
            seed=config.seed,
            weights=method,
            final_n_trees=config.effective_final_n_trees,
            kappa=config.kappa,
            n_jobs=args.threads,
        )
        save = save_model

    output = Path(args.output) if args.output else settings.MODEL_DIR / f"{dataset.name}-{method}.joblib"
    save(model, output)
    print(f"✅ Trained {method} on {dataset.name} (n={dataset.n}), saved to {output}")
    return EXIT_OK


def _load_any_model(path: Path):
    kind = saved_kind(path)
    if kind == "dcs_model":
        return load_dcs_model(path)
    return load_model(path)


def cmd_predict(args) -> int:
    model = _load_any_model(Path(args.model))
    dataset, labelled = load_instances(Path(args.instances))

    if isinstance(model, DCSModel):
        predictions, records = dcs_predict_batch(
            model, dataset.views, k=args.k, instance_ids=dataset.instance_ids, n_jobs=args.threads
        )
        if args.transcript:
            write_transcript(records, Path(args.transcript))
    else:
        predictions = model.predict_batch(dataset.views, n_jobs=args.threads)

    frame = pd.DataFrame({"instance_id": dataset.instance_ids, "prediction": predictions})
    if args.output:
        Path(args.output).parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(args.output, index=False)
    else:
        frame.to_csv(sys.stdout, index=False)

    if labelled:
        print(f"accuracy={accuracy(predictions, dataset.labels):.4f}", file=sys.stderr)
    return EXIT_OK


def cmd_bench(args) -> int:
    config = _load_config(args.configs, args)
    report = run_experiment(config, n_jobs=args.threads)

    directory = Path(args.output_dir) if args.output_dir else (config.output_dir or settings.REPORT_DIR)
    csv_path, json_path = write_report(report, directory, stem=args.stem)
    for line in summary_lines(report):
        print(line)
    print(f"✅ Report: {csv_path}, {json_path}")
    return EXIT_OK


def cmd_inspect(args) -> int:
    model = _load_any_model(Path(args.model))
    directory = Path(args.output_dir)
    directory.mkdir(parents=True, exist_ok=True)

    views = model.views
    for name, matrix in zip(views.view_names, views.matrices):
        matrix_to_csv(matrix, directory / f"view_{name}.csv")

    accuracies = views.oob_accuracies()
    summary = {
        "views": list(views.view_names),
        "view_oob_accuracy": accuracies,
        "fingerprint": views.fingerprint(),
    }
    if isinstance(model, MultiViewModel):
        matrix_to_csv(model.joint, directory / "joint.csv")
        summary["weights"] = list(model.weights.weights)
        summary["weight_method"] = model.weights.method.value
    else:
        matrix_to_csv(model.pool.full.joint, directory / "joint.csv")
        summary["pool_size"] = len(model.pool)
        summary["k"] = model.k
        summary["criterion"] = model.criterion

    with open(directory / "summary.json", "w", encoding="utf-8") as f:
        json.dump(summary, f, indent=2)

    if args.instances:
        if not isinstance(model, DCSModel):
            raise ParameterError("selection transcripts need a dcs_rfd model")
        dataset, _ = load_instances(Path(args.instances))
        _, records = dcs_predict_batch(
            model, dataset.views, instance_ids=dataset.instance_ids, n_jobs=args.threads
        )
        write_transcript(records, directory / "transcript.jsonl")

    print(f"✅ Exported {len(views.matrices)} view matrices to {directory}")
    return EXIT_OK


# ============================================================================
# Parser
# ============================================================================

def _add_overrides(parser: argparse.ArgumentParser, multiple_methods: bool) -> None:
    parser.add_argument("--seed", type=int, help="Master seed")
    parser.add_argument("--trees", type=int, help="Trees per forest (M)")
    parser.add_argument("--k", type=int, help="Region of competence size")
    parser.add_argument("--kappa", type=int, help="kDN neighbour count")
    if multiple_methods:
        parser.add_argument(
            "--method", action="append", choices=ALL_METHODS,
            help="Method to evaluate (repeatable)"
        )
    else:
        parser.add_argument("--method", choices=ALL_METHODS, help="Method to train")


def build_parser() -> CLIParser:
    parser = CLIParser(
        prog="rfd-multiview",
        description="Random Forest dissimilarity multi-view classification",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--verbose", action="store_true", help="Enable verbose logging")
    parser.add_argument("--version", action="version", version=f"{settings.APP_NAME} {settings.APP_VERSION}")
    parser.add_argument("--threads", type=int, default=None, help="joblib workers")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=CLIParser)

    validate = commands.add_parser("validate", help="Check a dataset manifest against its files")
    validate.add_argument("manifest")
    validate.set_defaults(handler=cmd_validate)

    train_parser = commands.add_parser("train", help="Train and save a model")
    train_parser.add_argument("config")
    train_parser.add_argument("--output", help="Model file (default: MODEL_DIR/<dataset>-<method>.joblib)")
    _add_overrides(train_parser, multiple_methods=False)
    train_parser.set_defaults(handler=cmd_train)

    predict = commands.add_parser("predict", help="Predict the instances of a manifest")
    predict.add_argument("model")
    predict.add_argument("instances", help="Manifest of the instances (labels optional)")
    predict.add_argument("--output", help="CSV of predictions (default: stdout)")
    predict.add_argument("--transcript", help="JSON lines selection transcript (dcs_rfd models)")
    predict.add_argument("--k", type=int, help="Region of competence size")
    predict.set_defaults(handler=cmd_predict)

    bench = commands.add_parser("bench", help="Run the benchmark protocol")
    bench.add_argument("configs", nargs="+")
    bench.add_argument("--output-dir", help="Report directory (default: REPORT_DIR)")
    bench.add_argument("--stem", default="report", help="Report file name stem")
    _add_overrides(bench, multiple_methods=True)
    bench.set_defaults(handler=cmd_bench)

    inspect = commands.add_parser("inspect", help="Export matrices, weights and transcripts")
    inspect.add_argument("model")
    inspect.add_argument("--output-dir", required=True)
    inspect.add_argument("--instances", help="Manifest of instances to write a selection transcript for")
    inspect.set_defaults(handler=cmd_inspect)

    for sub in (validate, train_parser, predict, bench, inspect):
        sub.add_argument("--verbose", action="store_true", default=argparse.SUPPRESS,
                         help="Enable verbose logging")
        sub.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="joblib workers")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """CLI entry point; returns the exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        _fail("usage", str(e))
        return EXIT_USAGE
    except SystemExit as e:
        # --help or --version
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else settings.LOG_LEVEL,
        format=settings.LOG_FORMAT,
        stream=sys.stderr,
    )
    if args.threads is not None and args.threads < 1:
        _fail("usage", f"--threads must be at least 1, got {args.threads}")
        return EXIT_USAGE
    logger.debug(f"{settings.APP_NAME} {settings.APP_VERSION}: {args.command}")

    try:
        return args.handler(args)
    except DATA_ERRORS as e:
        _fail(e.kind, str(e))
        return EXIT_DATA
    except ExperimentError as e:
        if isinstance(e.__cause__, DATA_ERRORS):
            _fail(e.__cause__.kind, str(e))
            return EXIT_DATA
        _fail(e.kind, str(e))
        return EXIT_RUNTIME
    except RFDError as e:
        _fail(e.kind, str(e))
        return EXIT_RUNTIME
    except Exception as e:
        logger.debug("Unhandled failure", exc_info=True)
        _fail("runtime", f"{type(e).__name__}: {e}")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
