"""CSV and markdown artifacts of the sweeps, plus the metrics report of ``eval``."""

import logging
from collections.abc import Sequence
from pathlib import Path

import pandas as pd

from src.experiments.experiments_dtos import (
    TABLE_COLUMNS,
    ResultRow,
    ResultTable,
    RunResult,
)
from src.metrics.metrics_dtos import METRIC_NAMES, MetricSummary, MetricsReport

FLOAT_FORMAT = "%.6f"
CSV_OPTIONS = {"index": False, "float_format": FLOAT_FORMAT, "lineterminator": "\n"}

DISPLAY_NAMES = {
    "dice": "Dice",
    "hd95": "95 Hausdorff",
    "precision": "Precision",
    "recall": "Recall",
    "mver": "MVER",
    "maver": "MAVER",
    "pearson_r": "Pearson's r",
}
CURVE_COLUMNS = (
    "run_id",
    "model",
    "combo",
    "fraction",
    "seed",
    "epoch",
    "train_loss",
    "train_dice",
    "val_dice",
)
SEED_COLUMNS = ("model", "combo", "fraction", "seed", "n_test", *METRIC_NAMES)


def _record(row: ResultRow) -> dict:
    record: dict = {
        "experiment": row.experiment,
        "target": row.target.value,
        "model": row.model,
        "combo": row.combo,
        "fraction": row.fraction,
        "n_train": row.n_train,
        "n_seeds": row.n_seeds,
        "n_test": row.n_test,
    }
    for metric in METRIC_NAMES:
        record[f"{metric}_mean"] = row.metrics[metric].mean
        record[f"{metric}_sem"] = row.metrics[metric].sem
    record["best"] = ";".join(row.best)
    return record


def table_frame(rows: Sequence[ResultRow]) -> pd.DataFrame:
    return pd.DataFrame([_record(row) for row in rows], columns=list(TABLE_COLUMNS))


def write_table_csv(rows: Sequence[ResultRow], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    table_frame(rows).to_csv(path, **CSV_OPTIONS)
    return path


def _optional_float(text: str) -> float | None:
    return float(text) if text != "" else None


def read_table_csv(path: str | Path) -> list[ResultRow]:
    frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    missing = set(TABLE_COLUMNS) - set(frame.columns)
    if missing:
        raise ValueError(f"{path} lacks columns {sorted(missing)}")

    rows = []
    for record in frame.to_dict(orient="records"):
        n_test = int(record["n_test"])
        metrics = {}
        for metric in METRIC_NAMES:
            mean = _optional_float(record[f"{metric}_mean"])
            metrics[metric] = MetricSummary(
                mean=mean,
                sem=_optional_float(record[f"{metric}_sem"]),
                n=n_test if mean is not None else 0,
            )
        rows.append(
            ResultRow(
                experiment=record["experiment"],
                target=record["target"],
                model=record["model"],
                combo=record["combo"],
                fraction=float(record["fraction"]),
                n_train=int(record["n_train"]),
                n_seeds=int(record["n_seeds"]),
                n_test=n_test,
                metrics=metrics,
                best=[name for name in record["best"].split(";") if name],
            )
        )
    return rows


def markdown_table(rows: Sequence[ResultRow]) -> str:
    """Table layout with mean±SEM cells; the best cell of each group is bold."""
    records = []
    for row in rows:
        record = {
            "Task": row.target.display_name,
            "Model": row.model,
            "Combo": row.combo,
            "n": row.n_train,
        }
        for metric in METRIC_NAMES:
            cell = row.metrics[metric].format()
            record[DISPLAY_NAMES[metric]] = f"**{cell}**" if metric in row.best else cell
        records.append(record)

    columns = ["Task", "Model", "Combo", "n", *DISPLAY_NAMES.values()]
    return pd.DataFrame(records, columns=columns).to_markdown(index=False)


def curves_frame(runs: Sequence[RunResult]) -> pd.DataFrame:
    records = [
        {
            "run_id": result.run.run_id,
            "model": result.run.model_kind,
            "combo": result.run.combo_label,
            "fraction": result.run.fraction,
            "seed": result.run.seed,
            "epoch": record.epoch,
            "train_loss": record.train_loss,
            "train_dice": record.train_dice,
            "val_dice": record.val_dice,
        }
        for result in runs
        for record in result.history
    ]
    return pd.DataFrame(records, columns=list(CURVE_COLUMNS))


def seed_frame(runs: Sequence[RunResult]) -> pd.DataFrame:
    """Per-seed means over the test subjects of every run."""
    records = []
    for result in runs:
        record: dict = {
            "model": result.run.model_kind,
            "combo": result.run.combo_label,
            "fraction": result.run.fraction,
            "seed": result.run.seed,
            "n_test": len(result.test_metrics),
        }
        for metric in METRIC_NAMES:
            values = [
                value
                for metrics in result.test_metrics
                if (value := metrics.value(metric)) is not None
            ]
            record[metric] = sum(values) / len(values) if values else None
        records.append(record)
    return pd.DataFrame(records, columns=list(SEED_COLUMNS))


def seed_spread_frame(runs: Sequence[RunResult]) -> pd.DataFrame:
    """Across-seed mean and sample standard deviation of the per-seed means."""
    columns = [
        "model",
        "combo",
        "fraction",
        "n_seeds",
        *(f"{metric}_{stat}" for metric in METRIC_NAMES for stat in ("seed_mean", "seed_std")),
    ]
    per_seed = seed_frame(runs)
    if per_seed.empty:
        return pd.DataFrame(columns=columns)

    records = []
    for (model, combo, fraction), group in per_seed.groupby(
        ["model", "combo", "fraction"], sort=False
    ):
        record: dict = {
            "model": model,
            "combo": combo,
            "fraction": fraction,
            "n_seeds": len(group),
        }
        for metric in METRIC_NAMES:
            values = pd.to_numeric(group[metric], errors="coerce").dropna()
            record[f"{metric}_seed_mean"] = values.mean() if len(values) else None
            record[f"{metric}_seed_std"] = values.std(ddof=1) if len(values) >= 2 else None
        records.append(record)
    return pd.DataFrame(records, columns=columns)


def report(table: ResultTable, out_dir: str | Path, stem: str | None = None) -> list[Path]:
    """Write the result table (CSV and markdown), learning curves, seed tables and raw runs (JSON).

    Args:
        table: Completed sweep
        out_dir: Output directory (created if missing)
        stem: File name prefix (default: "<experiment>_sweep")
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = stem if stem is not None else f"{table.experiment}_sweep"

    paths = [write_table_csv(table.rows, out_dir / f"{stem}.csv")]

    markdown_path = out_dir / f"{stem}.md"
    markdown_path.write_text(markdown_table(table.rows) + "\n")
    paths.append(markdown_path)

    for suffix, frame in (
        ("curves", curves_frame(table.runs)),
        ("seeds", seed_frame(table.runs)),
        ("seed_spread", seed_spread_frame(table.runs)),
    ):
        path = out_dir / f"{stem}_{suffix}.csv"
        frame.to_csv(path, **CSV_OPTIONS)
        paths.append(path)

    results_path = out_dir / f"{stem}.json"
    results_path.write_text(table.model_dump_json(indent=2))
    paths.append(results_path)

    logging.info(f"Report written to {out_dir}: {[path.name for path in paths]}")
    return paths


def write_metrics_report(metrics_report: MetricsReport, path: str | Path) -> Path:
    """Per-subject rows followed by ``mean`` and ``sem`` rows, metric columns in table order."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    records = [
        {"subject_id": subject.subject_id, **{m: subject.value(m) for m in METRIC_NAMES}}
        for subject in metrics_report.subjects
    ]
    for stat in ("mean", "sem"):
        records.append(
            {
                "subject_id": stat,
                **{m: getattr(metrics_report.summary(m), stat) for m in METRIC_NAMES},
            }
        )

    pd.DataFrame(records, columns=["subject_id", *METRIC_NAMES]).to_csv(path, **CSV_OPTIONS)
    return path

