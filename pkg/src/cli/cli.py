"""``freqfuse`` command line: cohort generation, disentanglement, training, evaluation, sweeps."""

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import TypeVar

from pydantic import BaseModel, ValidationError

from src.config.config import settings
from src.disentangle.disentangle import high_image, low_image, pad_and_invert, split_volume
from src.disentangle.disentangle_dtos import SplitConfig
from src.disentangle.errors import DisentangleError
from src.experiments.errors import ExperimentError
from src.experiments.experiments_dtos import ExperimentPlan, ResultTable, RunSpec
from src.experiments.harness import (
    CohortData,
    execute_run,
    run_combo_sweep,
    run_fraction_sweep,
    undefined_rows,
)
from src.experiments.report import (
    CSV_OPTIONS,
    curves_frame,
    markdown_table,
    read_table_csv,
    report,
    write_metrics_report,
)
from src.fusion.errors import FusionError
from src.fusion.fusion_dtos import RunConfig
from src.metrics.errors import MetricsError
from src.metrics.seg_metrics import aggregate, evaluate_directory
from src.network.errors import NetworkError
from src.phantom.cohort import generate_cohort
from src.phantom.errors import PhantomError
from src.phantom.phantom_dtos import PhantomSpec
from src.utils.modality import MODALITY_ORDER
from src.volume.errors import VolumeError
from src.volume.rvol_io import read_volume, write_rvol

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNDEFINED = 2

ModelT = TypeVar("ModelT", bound=BaseModel)

DOMAIN_ERRORS = (
    VolumeError,
    DisentangleError,
    NetworkError,
    FusionError,
    PhantomError,
    MetricsError,
    ExperimentError,
    ValidationError,
    OSError,
)


def _load_json(model: type[ModelT], path: str | None) -> ModelT:
    if path is None:
        return model()
    return model.model_validate_json(Path(path).read_text())


def _gen(args: argparse.Namespace) -> int:
    spec = _load_json(PhantomSpec, args.spec)
    if args.seed is not None:
        spec = spec.model_copy(update={"seed": args.seed})
    split = tuple(args.split) if args.split is not None else None
    generate_cohort(spec, args.n, args.out, split, workers=args.workers)
    return EXIT_OK


def _disentangle(args: argparse.Namespace) -> int:
    volume = read_volume(args.input)
    frequency_split = split_volume(volume, SplitConfig(theta=args.theta))
    prefix = args.out_prefix
    write_rvol(high_image(frequency_split), f"{prefix}_high")
    write_rvol(low_image(frequency_split), f"{prefix}_low")
    write_rvol(pad_and_invert(frequency_split), f"{prefix}_lowpad")
    logging.info(f"Frequency parts of {args.input} written with prefix {prefix}")
    return EXIT_OK


def _train(args: argparse.Namespace) -> int:
    config = _load_json(RunConfig, args.config)
    target = config.target_modality
    combo = (
        sorted({target, *config.prior_combo}, key=MODALITY_ORDER.index)
        if config.model_kind == "proposed"
        else [target]
    )
    out = Path(args.out)
    plan = ExperimentPlan(
        manifest=Path(args.manifest),
        target_modality=target,
        seeds=[config.seed],
        epochs=config.epochs,
        theta=config.theta,
        arch=config.arch,
        optimizer=config.optimizer,
        checkpoint_dir=out,
    )
    run = RunSpec(
        experiment="fraction",
        model_kind=config.model_kind,
        target=target,
        combo=combo,
        fraction=config.train_fraction,
        seed=config.seed,
    )

    result = execute_run(plan, run, CohortData(plan.manifest))
    curves_frame([result]).to_csv(out / f"{run.run_id}_curves.csv", **CSV_OPTIONS)
    test_report = aggregate(result.test_metrics)
    write_metrics_report(test_report, out / f"{run.run_id}_test.csv")
    logging.info(f"Test Dice of {run.run_id}: {test_report.summary('dice').format()}")
    return EXIT_OK


def _eval(args: argparse.Namespace) -> int:
    metrics_report = evaluate_directory(args.pred, args.gt)
    write_metrics_report(metrics_report, args.out)
    if metrics_report.all_undefined:
        logging.error("Every subject has undefined metrics")
        return EXIT_UNDEFINED
    return EXIT_OK


def _finish_sweep(table: ResultTable, out: str) -> int:
    report(table, out)
    undefined = undefined_rows(table)
    if undefined:
        labels = [row.combo for row in undefined]
        logging.error(f"Undefined metrics for every test subject in: {labels}")
        return EXIT_UNDEFINED
    return EXIT_OK


def _sweep_combos(args: argparse.Namespace) -> int:
    return _finish_sweep(run_combo_sweep(_load_json(ExperimentPlan, args.plan)), args.out)


def _sweep_fractions(args: argparse.Namespace) -> int:
    return _finish_sweep(run_fraction_sweep(_load_json(ExperimentPlan, args.plan)), args.out)


def _report(args: argparse.Namespace) -> int:
    source = Path(args.results)
    if source.suffix == ".json":
        table = ResultTable.model_validate_json(source.read_text())
        report(table, args.out, stem=source.stem)
        return EXIT_OK

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{source.stem}.md").write_text(markdown_table(read_table_csv(source)) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="freqfuse",
        description="Frequency-disentangled multimodal fusion for small-structure segmentation",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen", help="Generate a phantom cohort")
    gen.add_argument("--spec", help="PhantomSpec JSON (default: built-in spec)")
    gen.add_argument("--n", type=int, default=80, help="Number of subjects")
    gen.add_argument("--out", required=True, help="Output directory")
    gen.add_argument("--split", type=float, nargs=3, metavar=("TRAIN", "VAL", "TEST"))
    gen.add_argument("--seed", type=int, help="Overrides the PhantomSpec seed")
    gen.add_argument("--workers", type=int, help="Generation processes")
    gen.set_defaults(handler=_gen)

    disentangle = commands.add_parser("disentangle", help="Split a volume into frequency parts")
    disentangle.add_argument("--input", required=True, help="RVOL volume")
    disentangle.add_argument("--theta", type=float, default=settings.disentangle.theta)
    disentangle.add_argument(
        "--out-prefix", required=True, help="Writes <prefix>_high, <prefix>_low, <prefix>_lowpad"
    )
    disentangle.set_defaults(handler=_disentangle)

    train = commands.add_parser("train", help="Train one configuration and test it")
    train.add_argument("--config", required=True, help="RunConfig JSON")
    train.add_argument("--manifest", required=True, help="Cohort manifest or directory")
    train.add_argument("--out", required=True, help="Checkpoint and curve directory")
    train.set_defaults(handler=_train)

    evaluate = commands.add_parser("eval", help="Evaluate predicted masks against ground truth")
    evaluate.add_argument("--pred", required=True, help="Directory of predicted RVOL masks")
    evaluate.add_argument("--gt", required=True, help="Directory of ground-truth RVOL masks")
    evaluate.add_argument("--out", required=True, help="CSV report path")
    evaluate.set_defaults(handler=_eval)

    for name, handler, help_text in (
        ("sweep-combos", _sweep_combos, "Compare prior modality combinations"),
        ("sweep-fractions", _sweep_fractions, "Compare training set sizes against the baseline"),
    ):
        sweep = commands.add_parser(name, help=help_text)
        sweep.add_argument("--plan", required=True, help="ExperimentPlan JSON")
        sweep.add_argument("--out", required=True, help="Report directory")
        sweep.set_defaults(handler=handler)

    report_parser = commands.add_parser("report", help="Rebuild report files from sweep results")
    report_parser.add_argument("--results", required=True, help="Sweep JSON or result CSV")
    report_parser.add_argument("--out", required=True, help="Report directory")
    report_parser.set_defaults(handler=_report)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO)

    try:
        return args.handler(args)
    except DOMAIN_ERRORS as e:
        logging.error(f"{args.command} failed: {getattr(e, 'message', e)}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
