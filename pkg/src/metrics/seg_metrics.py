"""Voxel-level segmentation metrics and their mean ± SEM aggregation."""

import logging
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import TypeVar

import numpy as np
from scipy import stats
from scipy.ndimage import binary_erosion, distance_transform_edt, generate_binary_structure

from src.config.config import settings
from src.metrics.errors import MetricsError, UndefinedMetricError
from src.metrics.metrics_dtos import METRIC_NAMES, MetricSummary, MetricsReport, SubjectMetrics
from src.volume.rvol_io import RVOL_SUFFIX, read_mask
from src.volume.volume import Mask

T = TypeVar("T")


def _check_pair(pred: Mask, gt: Mask, metric: str, *, require_gt: bool = True) -> None:
    if pred.shape != gt.shape:
        raise MetricsError(f"Prediction {pred.shape} and ground truth {gt.shape} differ")
    if require_gt and gt.is_empty:
        raise UndefinedMetricError("undefined metric: empty ground truth", metric=metric)


def _confusion(pred: Mask, gt: Mask) -> tuple[int, int, int]:
    p, g = pred.foreground, gt.foreground
    true_positive = int(np.count_nonzero(p & g))
    false_positive = int(np.count_nonzero(p & ~g))
    false_negative = int(np.count_nonzero(~p & g))
    return true_positive, false_positive, false_negative


def dice(pred: Mask, gt: Mask) -> float:
    _check_pair(pred, gt, "dice")
    true_positive, _, _ = _confusion(pred, gt)
    return 2 * true_positive / (pred.voxel_count + gt.voxel_count)


def precision_recall(pred: Mask, gt: Mask) -> tuple[float, float]:
    """Precision is 0 for an empty prediction."""
    _check_pair(pred, gt, "precision_recall")
    true_positive, false_positive, false_negative = _confusion(pred, gt)
    predicted = true_positive + false_positive
    precision = true_positive / predicted if predicted else 0.0
    return precision, true_positive / (true_positive + false_negative)


def boundary(mask: Mask) -> np.ndarray:
    """Foreground voxels with a face-adjacent background voxel; outside the grid is background."""
    structure = generate_binary_structure(mask.ndim, 1)
    foreground = mask.foreground
    return foreground ^ binary_erosion(foreground, structure=structure, border_value=0)


def surface_distances(
    pred: Mask, gt: Mask, spacing: tuple[float, ...] | None = None
) -> np.ndarray:
    """Pooled directed nearest-boundary distances, pred to gt followed by gt to pred."""
    sampling = spacing if spacing is not None else gt.spacing
    pred_border, gt_border = boundary(pred), boundary(gt)

    to_gt = distance_transform_edt(~gt_border, sampling=sampling)[pred_border]
    to_pred = distance_transform_edt(~pred_border, sampling=sampling)[gt_border]
    return np.concatenate((to_gt, to_pred))


def hd95(
    pred: Mask,
    gt: Mask,
    spacing: tuple[float, ...] | None = None,
    *,
    percentile: float | None = None,
) -> float:
    """Percentile (default 95th, linear interpolation) of the pooled surface distances.

    Args:
        pred: Predicted mask
        gt: Ground-truth mask
        spacing: Voxel size per axis (default: the ground truth's spacing)
        percentile: Overrides settings.metrics.hd_percentile
    """
    _check_pair(pred, gt, "hd95")
    if pred.is_empty:
        raise UndefinedMetricError("undefined metric: empty prediction", metric="hd95")

    percentile = percentile if percentile is not None else settings.metrics.hd_percentile
    return float(np.percentile(surface_distances(pred, gt, spacing), percentile))


def volume_error(pred: Mask, gt: Mask) -> tuple[float, float]:
    """Signed relative volume error ``(|P| - |G|) / |G|`` and its absolute value."""
    _check_pair(pred, gt, "volume_error")
    term = (pred.voxel_count - gt.voxel_count) / gt.voxel_count
    return term, abs(term)


def pearson_r(pred: Mask, gt: Mask) -> float:
    _check_pair(pred, gt, "pearson_r", require_gt=False)
    p = pred.data.ravel().astype(np.float64)
    g = gt.data.ravel().astype(np.float64)
    if np.all(p == p[0]) or np.all(g == g[0]):
        raise UndefinedMetricError("undefined metric: constant map", metric="pearson_r")
    return float(stats.pearsonr(p, g).statistic)


def _defined(metric: str, subject_id: str, compute: Callable[[], T]) -> T | None:
    try:
        return compute()
    except UndefinedMetricError as e:
        logging.info(f"[subject={subject_id}] {metric} excluded: {e.message}")
        return None


def evaluate_subject(
    subject_id: str, pred: Mask, gt: Mask, spacing: tuple[float, ...] | None = None
) -> SubjectMetrics:
    rates = _defined("precision_recall", subject_id, lambda: precision_recall(pred, gt))
    volume_terms = _defined("volume_error", subject_id, lambda: volume_error(pred, gt))

    return SubjectMetrics(
        subject_id=subject_id,
        dice=_defined("dice", subject_id, lambda: dice(pred, gt)),
        hd95=_defined("hd95", subject_id, lambda: hd95(pred, gt, spacing)),
        precision=rates[0] if rates is not None else None,
        recall=rates[1] if rates is not None else None,
        mver=volume_terms[0] if volume_terms is not None else None,
        maver=volume_terms[1] if volume_terms is not None else None,
        pearson_r=_defined("pearson_r", subject_id, lambda: pearson_r(pred, gt)),
    )


def summarize(values: Sequence[float | None]) -> MetricSummary:
    """Mean and SEM (sample std / sqrt(n)) of the defined values."""
    defined = np.array([value for value in values if value is not None], dtype=np.float64)
    excluded = len(values) - defined.size

    if defined.size == 0:
        return MetricSummary(mean=None, sem=None, n=0, excluded=excluded)

    sem = float(stats.sem(defined, ddof=1)) if defined.size >= 2 else None
    return MetricSummary(mean=float(defined.mean()), sem=sem, n=int(defined.size), excluded=excluded)


def aggregate(per_subject: Sequence[SubjectMetrics]) -> MetricsReport:
    summaries = {
        metric: summarize([subject.value(metric) for subject in per_subject])
        for metric in METRIC_NAMES
    }
    for metric, summary in summaries.items():
        if summary.excluded:
            logging.warning(f"{metric}: {summary.excluded} undefined subject(s) excluded")

    return MetricsReport(subjects=list(per_subject), summaries=summaries)


def evaluate_directory(pred_dir: str | Path, gt_dir: str | Path) -> MetricsReport:
    """Evaluate every ground-truth mask against the prediction with the same file name."""
    pred_dir, gt_dir = Path(pred_dir), Path(gt_dir)
    gt_paths = sorted(gt_dir.glob(f"*{RVOL_SUFFIX}"))
    if not gt_paths:
        raise MetricsError(f"No ground-truth masks found in {gt_dir}")

    per_subject = []
    for gt_path in gt_paths:
        pred_path = pred_dir / gt_path.name
        if not pred_path.exists():
            raise MetricsError(f"Missing prediction for {gt_path.name} in {pred_dir}")
        gt = read_mask(gt_path)
        per_subject.append(
            evaluate_subject(gt_path.name.removesuffix(RVOL_SUFFIX), read_mask(pred_path), gt)
        )

    logging.info(f"Evaluated {len(per_subject)} subjects from {pred_dir}")
    return aggregate(per_subject)
