"""The two sweeps run on a generated cohort.

The combo sweep trains the fusion network for every combination of prior
modalities at a small training fraction. The fraction sweep trains the baseline
and the fusion network on nested subsets of the training pool. In both, the
priors of every sample come from a single donor subject of the training pool.
"""

import logging
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from itertools import combinations
from pathlib import Path

import numpy as np

from src.experiments.errors import EmptySubsetError, ExperimentError, MissingModalityError
from src.experiments.experiments_dtos import (
    ExperimentKind,
    ExperimentPlan,
    ResultRow,
    ResultTable,
    RunResult,
    RunSpec,
)
from src.experiments.report import read_table_csv
from src.fusion.fusion_dtos import ModalitySample
from src.fusion.priors import DonorVolume, build_sample
from src.fusion.training import predict, restore_model, train
from src.metrics.metrics_dtos import METRIC_NAMES, MetricSummary
from src.metrics.seg_metrics import evaluate_subject, summarize
from src.network.checkpoint import save_checkpoint
from src.phantom.cohort import load_manifest, load_subject, manifest_path
from src.phantom.phantom_dtos import LoadedSubject, SplitName
from src.utils.modality import MODALITY_ORDER, Modality, combo_label, parse_combo_label
from src.utils.seeding import derive_seed

_SUBSET_STREAM = 7
_SUBSET_EPSILON = 1e-9
_TIE_TOLERANCE = 1e-12

HIGHER_IS_BETTER = frozenset({"dice", "precision", "recall", "pearson_r"})
LOWER_IS_BETTER = frozenset({"hd95", "maver"})


class CohortData:
    """A cohort manifest with its subjects loaded on first use."""

    def __init__(self, path: str | Path):
        self._manifest_path = manifest_path(path)
        self.manifest = load_manifest(self._manifest_path)
        self._entries = {entry.subject_id: entry for entry in self.manifest.subjects}
        self._subjects: dict[str, LoadedSubject] = {}

    @property
    def modalities(self) -> list[Modality]:
        return self.manifest.modalities

    def ids(self, split: SplitName) -> list[str]:
        return [entry.subject_id for entry in self.manifest.split(split)]

    def subject(self, subject_id: str) -> LoadedSubject:
        if subject_id not in self._subjects:
            self._subjects[subject_id] = load_subject(
                self._manifest_path.parent, self._entries[subject_id]
            )
        return self._subjects[subject_id]


def all_combos(target: Modality, modalities: Sequence[Modality]) -> list[list[Modality]]:
    """The target alone, then with every subset of the other modalities, smallest first."""
    others = [
        modality
        for modality in MODALITY_ORDER
        if modality in modalities and modality != target
    ]
    return [
        sorted([target, *subset], key=MODALITY_ORDER.index)
        for size in range(len(others) + 1)
        for subset in combinations(others, size)
    ]


def subset_size(fraction: float, pool_size: int) -> int:
    size = math.ceil(fraction * pool_size - _SUBSET_EPSILON)
    if size < 1:
        raise EmptySubsetError(
            f"Fraction {fraction} of {pool_size} subjects selects nobody", fraction=fraction
        )
    return min(size, pool_size)


def select_training_subset(
    pool_ids: Sequence[str], fraction: float, seed: int
) -> tuple[list[str], str]:
    """Seeded subset of the training pool plus the prior donor.

    Subsets are prefixes of one seeded permutation, so they are nested across
    fractions. The donor is the permutation's last subject; it only falls inside
    the subset at fraction 1.0.
    """
    if not pool_ids:
        raise EmptySubsetError("Training pool is empty", fraction=fraction)

    rng = np.random.default_rng(derive_seed(seed, _SUBSET_STREAM))
    ordered = [pool_ids[index] for index in rng.permutation(len(pool_ids))]
    return ordered[: subset_size(fraction, len(ordered))], ordered[-1]


def _check_modalities(cohort: CohortData, combo: Sequence[Modality]) -> None:
    for modality in combo:
        if modality not in cohort.modalities:
            raise MissingModalityError(
                f"Cohort has no {modality.display_name} volumes", modality=modality.value
            )


def make_sample(
    subject: LoadedSubject,
    run: RunSpec,
    donor: LoadedSubject | None,
    theta: float,
) -> ModalitySample:
    donors = [
        DonorVolume(modality=modality, donor_id=donor.subject_id, volume=donor.volumes[modality])
        for modality in run.combo
        if donor is not None and modality != run.target
    ]
    return build_sample(
        subject.subject_id,
        run.target,
        subject.volumes[run.target],
        subject.mask,
        donors,
        run.combo,
        theta,
    )


def execute_run(plan: ExperimentPlan, run: RunSpec, cohort: CohortData) -> RunResult:
    """Train one configuration and evaluate its selected checkpoint on the test split."""
    _check_modalities(cohort, run.combo)

    subset, donor_id = select_training_subset(cohort.ids("train"), run.fraction, run.seed)
    uses_donor = run.model_kind == "proposed" and len(run.combo) > 1
    donor = cohort.subject(donor_id) if uses_donor else None

    held_out = set(cohort.ids("val")) | set(cohort.ids("test"))
    if held_out & ({*subset, donor_id} if uses_donor else set(subset)):
        raise ExperimentError(f"Run {run.run_id} would train on held-out subjects")

    def samples(ids: Sequence[str]) -> list[ModalitySample]:
        return [make_sample(cohort.subject(i), run, donor, plan.theta) for i in ids]

    logging.info(
        f"Run {run.run_id}: {len(subset)} training subjects"
        + (f", priors from {donor_id}" if uses_donor else "")
    )
    result = train(
        samples(subset),
        samples(cohort.ids("val")),
        plan.fusion_config,
        model_kind=run.model_kind,
        epochs=plan.epochs,
        seed=run.seed,
    )
    if plan.checkpoint_dir is not None:
        save_checkpoint(result.checkpoint, plan.checkpoint_dir / run.run_id)

    model = restore_model(result.checkpoint)
    test_metrics = [
        evaluate_subject(
            sample.subject_id,
            predict(sample, model, plan.prediction_threshold),
            sample.mask,
        )
        for sample in samples(cohort.ids("test"))
    ]
    return RunResult(
        run=run,
        train_ids=subset,
        donor_id=donor_id if uses_donor else None,
        test_metrics=test_metrics,
        history=result.history,
        best_epoch=result.best_epoch,
    )


def _execute_in_worker(plan: ExperimentPlan, run: RunSpec) -> RunResult:
    return execute_run(plan, run, CohortData(plan.manifest))


def execute_runs(
    plan: ExperimentPlan, runs: Sequence[RunSpec], cohort: CohortData
) -> list[RunResult]:
    """Run every configuration; results keep the order of ``runs`` with or without workers."""
    if plan.workers is not None and plan.workers > 1:
        with ProcessPoolExecutor(max_workers=plan.workers) as executor:
            return list(executor.map(_execute_in_worker, [plan] * len(runs), runs))

    results = []
    for index, run in enumerate(runs, start=1):
        logging.info(f"Sweep progress {index}/{len(runs)}: {run.run_id}")
        results.append(execute_run(plan, run, cohort))
    return results


def summarize_runs(experiment: ExperimentKind, results: Sequence[RunResult]) -> list[ResultRow]:
    """One row per configuration; seeds are averaged per test subject before mean ± SEM."""
    groups: dict[tuple, list[RunResult]] = {}
    for result in results:
        run = result.run
        key = (run.model_kind, run.target, run.combo_label, run.fraction)
        groups.setdefault(key, []).append(result)

    rows = []
    for (model, target, label, fraction), group in groups.items():
        subject_ids = [metrics.subject_id for metrics in group[0].test_metrics]
        summaries: dict[str, MetricSummary] = {}
        for metric in METRIC_NAMES:
            per_subject = []
            for subject_id in subject_ids:
                values = [
                    value
                    for result in group
                    for metrics in result.test_metrics
                    if metrics.subject_id == subject_id
                    and (value := metrics.value(metric)) is not None
                ]
                per_subject.append(float(np.mean(values)) if values else None)
            summaries[metric] = summarize(per_subject)

        rows.append(
            ResultRow(
                experiment=experiment,
                target=target,
                model=model,
                combo=label,
                fraction=fraction,
                n_train=len(group[0].train_ids),
                n_seeds=len(group),
                n_test=len(subject_ids),
                metrics=summaries,
            )
        )
    return rows


def _score(metric: str, mean: float) -> float:
    if metric in HIGHER_IS_BETTER:
        return mean
    if metric in LOWER_IS_BETTER:
        return -mean
    return -abs(mean)


def flag_best(
    rows: Sequence[ResultRow], group_key: Callable[[ResultRow], tuple]
) -> list[ResultRow]:
    """Mark, within each group, the rows holding the best value of every metric (ties included).

    MVER is best when closest to zero; HD95 and MAVER when lowest; the rest when highest.
    """
    best: dict[int, list[str]] = {index: [] for index in range(len(rows))}
    groups: dict[tuple, list[int]] = {}
    for index, row in enumerate(rows):
        groups.setdefault(group_key(row), []).append(index)

    for members in groups.values():
        for metric in METRIC_NAMES:
            scored = [
                (index, _score(metric, mean))
                for index in members
                if (mean := rows[index].metrics[metric].mean) is not None
            ]
            if not scored:
                continue
            top = max(score for _, score in scored)
            for index, score in scored:
                if score >= top - _TIE_TOLERANCE:
                    best[index].append(metric)

    return [row.model_copy(update={"best": best[index]}) for index, row in enumerate(rows)]


def best_combos(rows: Sequence[ResultRow]) -> dict[Modality, str]:
    """Best combo per target by mean Dice; a lower SEM breaks ties."""
    chosen: dict[Modality, ResultRow] = {}
    for row in rows:
        dice = row.metrics["dice"]
        if row.experiment != "combo" or dice.mean is None:
            continue

        current = chosen.get(row.target)
        if current is None:
            chosen[row.target] = row
            continue

        current_dice = current.metrics["dice"]
        assert current_dice.mean is not None
        if dice.mean > current_dice.mean + _TIE_TOLERANCE:
            chosen[row.target] = row
        elif abs(dice.mean - current_dice.mean) <= _TIE_TOLERANCE:
            sem = dice.sem if dice.sem is not None else math.inf
            current_sem = current_dice.sem if current_dice.sem is not None else math.inf
            if sem < current_sem:
                chosen[row.target] = row

    return {target: row.combo for target, row in chosen.items()}


def undefined_rows(table: ResultTable) -> list[ResultRow]:
    """Rows whose test cohort has no defined value for any metric."""
    return [
        row
        for row in table.rows
        if all(summary.mean is None for summary in row.metrics.values())
    ]


def run_combo_sweep(plan: ExperimentPlan, cohort: CohortData | None = None) -> ResultTable:
    cohort = cohort if cohort is not None else CohortData(plan.manifest)
    combos = (
        plan.combos
        if plan.combos is not None
        else all_combos(plan.target_modality, cohort.modalities)
    )
    for combo in combos:
        _check_modalities(cohort, combo)

    runs = [
        RunSpec(
            experiment="combo",
            model_kind="proposed",
            target=plan.target_modality,
            combo=combo,
            fraction=plan.combo_fraction,
            seed=seed,
        )
        for combo in combos
        for seed in plan.seeds
    ]
    logging.info(f"Combo sweep for {plan.target_modality.display_name}: {len(runs)} runs")

    results = execute_runs(plan, runs, cohort)
    rows = flag_best(summarize_runs("combo", results), lambda row: (row.target,))
    return ResultTable(experiment="combo", rows=rows, runs=results)


def resolve_prior_combo(plan: ExperimentPlan, cohort: CohortData) -> list[Modality]:
    """Explicit combo, else the best combo of a previous combo sweep, else every modality."""
    if plan.prior_combo is not None:
        return plan.prior_combo

    if plan.best_combo_source is not None:
        best = best_combos(read_table_csv(plan.best_combo_source))
        if plan.target_modality not in best:
            raise ExperimentError(
                f"{plan.best_combo_source} has no combo rows for {plan.target_modality.display_name}"
            )
        logging.info(f"Using best combo {best[plan.target_modality]} from {plan.best_combo_source}")
        return parse_combo_label(best[plan.target_modality])

    return [modality for modality in MODALITY_ORDER if modality in cohort.modalities]


def run_fraction_sweep(plan: ExperimentPlan, cohort: CohortData | None = None) -> ResultTable:
    cohort = cohort if cohort is not None else CohortData(plan.manifest)
    combo = resolve_prior_combo(plan, cohort)
    _check_modalities(cohort, combo)

    runs = [
        RunSpec(
            experiment="fraction",
            model_kind=model,
            target=plan.target_modality,
            combo=combo if model == "proposed" else [plan.target_modality],
            fraction=fraction,
            seed=seed,
        )
        for model in plan.models
        for fraction in plan.fractions
        for seed in plan.seeds
    ]
    logging.info(
        f"Fraction sweep for {plan.target_modality.display_name} with priors "
        f"{combo_label(combo)}: {len(runs)} runs"
    )

    results = execute_runs(plan, runs, cohort)
    rows = flag_best(
        summarize_runs("fraction", results), lambda row: (row.target, row.fraction)
    )
    return ResultTable(experiment="fraction", rows=rows, runs=results)
