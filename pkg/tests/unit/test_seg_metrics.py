"""Unit tests for segmentation metrics and their aggregation."""

import itertools
from pathlib import Path

import numpy as np
import pytest

from src.metrics.errors import MetricsError, UndefinedMetricError
from src.metrics.metrics_dtos import METRIC_NAMES, SubjectMetrics
from src.metrics.seg_metrics import (
    aggregate,
    dice,
    evaluate_directory,
    evaluate_subject,
    hd95,
    pearson_r,
    precision_recall,
    summarize,
    volume_error,
)
from src.volume.rvol_io import write_rvol
from src.volume.volume import Mask
from tests.conftest import blob_mask, random_mask


def line_mask(length: int, foreground: list[int]) -> Mask:
    data = np.zeros((1, length), dtype=np.uint8)
    data[0, foreground] = 1
    return Mask(data)


def brute_force_boundary(mask: Mask) -> list[tuple[int, ...]]:
    """Foreground voxels with a face neighbour that is background or off the grid."""
    padded = np.pad(mask.foreground, 1, constant_values=False)
    points = []
    for index in zip(*np.nonzero(mask.foreground), strict=True):
        for axis, delta in itertools.product(range(mask.ndim), (-1, 1)):
            neighbour = [position + 1 for position in index]
            neighbour[axis] += delta
            if not padded[tuple(neighbour)]:
                points.append(tuple(int(position) for position in index))
                break
    return points


def brute_force_hd95(pred: Mask, gt: Mask, spacing: tuple[float, ...]) -> float:
    scale = np.asarray(spacing)
    pred_points = np.asarray(brute_force_boundary(pred), dtype=np.float64) * scale
    gt_points = np.asarray(brute_force_boundary(gt), dtype=np.float64) * scale
    pairwise = np.sqrt(((pred_points[:, None, :] - gt_points[None, :, :]) ** 2).sum(axis=-1))
    pooled = np.concatenate((pairwise.min(axis=1), pairwise.min(axis=0)))
    return float(np.percentile(pooled, 95))


def random_blob(rng: np.random.Generator, shape: tuple[int, ...]) -> Mask:
    center = tuple(rng.uniform(2, size - 3) for size in shape)
    return blob_mask(shape, center, rng.uniform(1.0, min(shape) / 3))


class TestDice:
    def test_identical_masks(self, rng: np.random.Generator):
        mask = random_mask(rng, (6, 6))

        assert dice(mask, mask) == 1.0

    def test_disjoint_masks(self):
        assert dice(line_mask(8, [0, 1]), line_mask(8, [5, 6])) == 0.0

    def test_partial_overlap_counts(self):
        pred = line_mask(10, [0, 1, 2, 3, 4, 5])
        gt = line_mask(10, [3, 4, 5, 6])

        assert dice(pred, gt) == pytest.approx(0.6)

    def test_empty_prediction_scores_zero(self):
        assert dice(line_mask(4, []), line_mask(4, [1])) == 0.0

    def test_empty_ground_truth_is_undefined(self):
        with pytest.raises(UndefinedMetricError, match="undefined metric") as error:
            dice(line_mask(4, [1]), line_mask(4, []))

        assert error.value.metric == "dice"

    def test_shape_mismatch_is_rejected(self):
        with pytest.raises(MetricsError):
            dice(line_mask(4, [1]), line_mask(5, [1]))


class TestPrecisionRecall:
    def test_superset_prediction(self):
        precision, recall = precision_recall(line_mask(8, [0, 1, 2, 3]), line_mask(8, [0, 1]))

        assert (precision, recall) == (0.5, 1.0)

    def test_empty_prediction_has_zero_precision(self):
        assert precision_recall(line_mask(4, []), line_mask(4, [2])) == (0.0, 0.0)

    def test_random_masks_match_confusion_counts(self, rng: np.random.Generator):
        for _ in range(50):
            pred, gt = random_mask(rng, (6, 6)), random_mask(rng, (6, 6))
            true_positive = sum(
                1 for p, g in zip(pred.data.flat, gt.data.flat, strict=True) if p and g
            )

            precision, recall = precision_recall(pred, gt)

            assert precision == pytest.approx(true_positive / pred.voxel_count, abs=1e-12)
            assert recall == pytest.approx(true_positive / gt.voxel_count, abs=1e-12)
            assert dice(pred, gt) == pytest.approx(
                2 * true_positive / (pred.voxel_count + gt.voxel_count), abs=1e-12
            )


class TestHd95:
    def test_identical_masks_are_zero(self, rng: np.random.Generator):
        mask = random_blob(rng, (12, 12))

        assert hd95(mask, mask) == 0.0

    def test_single_voxels_five_apart(self):
        assert hd95(line_mask(10, [1]), line_mask(10, [6])) == pytest.approx(5.0)

    def test_distances_are_scaled_by_spacing(self):
        pred = Mask(line_mask(10, [1]).data, spacing=(1.0, 0.5))
        gt = Mask(line_mask(10, [6]).data, spacing=(1.0, 0.5))

        assert hd95(pred, gt) == pytest.approx(2.5)
        assert hd95(pred, gt, spacing=(1.0, 2.0)) == pytest.approx(10.0)

    def test_matches_all_pairs_oracle(self, rng: np.random.Generator):
        for case in range(100):
            shape = (12, 12) if case % 2 == 0 else (12, 12, 12)
            spacing = tuple(float(value) for value in rng.uniform(0.5, 2.0, len(shape)))
            pred, gt = random_blob(rng, shape), random_blob(rng, shape)

            actual = hd95(pred, gt, spacing)

            expected = brute_force_hd95(pred, gt, spacing)
            assert actual == pytest.approx(expected, abs=1e-9), f"Case {case} shape {shape}"

    def test_symmetric(self, rng: np.random.Generator):
        a, b = random_blob(rng, (12, 12, 12)), random_blob(rng, (12, 12, 12))

        assert hd95(a, b) == pytest.approx(hd95(b, a), abs=1e-12)
        assert dice(a, b) == dice(b, a)

    def test_translation_invariant(self):
        pred = blob_mask((20, 20), (8.0, 8.0), 3.0)
        gt = blob_mask((20, 20), (9.0, 7.0), 4.0)
        shifted_pred = Mask(np.roll(pred.data, (3, 2), axis=(0, 1)))
        shifted_gt = Mask(np.roll(gt.data, (3, 2), axis=(0, 1)))

        original = evaluate_subject("original", pred, gt)
        shifted = evaluate_subject("shifted", shifted_pred, shifted_gt)

        for metric in METRIC_NAMES:
            assert shifted.value(metric) == pytest.approx(original.value(metric), abs=1e-12), metric

    def test_empty_prediction_is_undefined(self):
        with pytest.raises(UndefinedMetricError):
            hd95(line_mask(4, []), line_mask(4, [1]))


class TestVolumeError:
    def test_identical_volumes(self):
        mask = line_mask(6, [1, 2])

        assert volume_error(mask, mask) == (0.0, 0.0)

    def test_double_volume(self):
        assert volume_error(line_mask(10, list(range(8))), line_mask(10, [0, 1, 2, 3])) == (
            1.0,
            1.0,
        )

    def test_under_segmentation_is_negative(self):
        assert volume_error(line_mask(10, [0, 1]), line_mask(10, [0, 1, 2, 3])) == (-0.5, 0.5)


class TestPearson:
    def test_identical_and_complementary_maps(self, rng: np.random.Generator):
        mask = random_mask(rng, (8, 8))
        complement = Mask(1 - mask.data)

        assert pearson_r(mask, mask) == pytest.approx(1.0)
        assert pearson_r(complement, mask) == pytest.approx(-1.0)

    def test_matches_textbook_formula(self, rng: np.random.Generator):
        for _ in range(20):
            pred, gt = random_mask(rng, (8, 8)), random_mask(rng, (8, 8))
            p = pred.data.ravel().astype(np.float64)
            g = gt.data.ravel().astype(np.float64)

            expected = np.sum((p - p.mean()) * (g - g.mean())) / np.sqrt(
                np.sum((p - p.mean()) ** 2) * np.sum((g - g.mean()) ** 2)
            )

            assert pearson_r(pred, gt) == pytest.approx(expected, abs=1e-12)

    def test_constant_map_is_undefined(self):
        with pytest.raises(UndefinedMetricError):
            pearson_r(line_mask(4, []), line_mask(4, [1]))


class TestAggregation:
    def test_equal_values_have_zero_sem(self):
        summary = summarize([0.8, 0.8])

        assert summary.mean == pytest.approx(0.8)
        assert summary.sem == 0.0

    def test_two_values_give_sample_sem(self):
        summary = summarize([0.7, 0.9])

        assert summary.mean == pytest.approx(0.8)
        assert summary.sem == pytest.approx(0.1)
        assert summary.format() == "0.80±0.10"

    def test_single_value_has_no_sem(self):
        summary = summarize([0.75])

        assert summary.sem is None
        assert summary.format() == "0.75"

    def test_undefined_values_are_excluded_and_counted(self):
        summary = summarize([0.5, None, 0.7])

        assert summary.n == 2
        assert summary.excluded == 1
        assert summary.mean == pytest.approx(0.6)

    def test_opposite_volume_errors_cancel_in_mver_only(self):
        subjects = [
            SubjectMetrics(subject_id="a", mver=0.5, maver=0.5),
            SubjectMetrics(subject_id="b", mver=-0.5, maver=0.5),
        ]

        report = aggregate(subjects)

        assert report.summary("mver").mean == pytest.approx(0.0)
        assert report.summary("maver").mean == pytest.approx(0.5)
        assert report.summary("dice").mean is None
        assert report.summary("dice").excluded == 2

    def test_empty_ground_truth_subject_is_excluded(self, rng: np.random.Generator):
        gt = random_mask(rng, (8, 8))
        subjects = [
            evaluate_subject("good", gt, gt),
            evaluate_subject("empty", random_mask(rng, (8, 8)), Mask(np.zeros((8, 8)))),
        ]

        report = aggregate(subjects)

        assert report.summary("dice").n == 1
        assert report.summary("dice").excluded == 1
        assert report.summary("pearson_r").excluded == 1
        assert not report.all_undefined

    def test_fully_undefined_cohort(self):
        subject = evaluate_subject("empty", Mask(np.zeros((4, 4))), Mask(np.zeros((4, 4))))

        assert subject.is_fully_undefined
        assert aggregate([subject]).all_undefined


class TestEvaluateDirectory:
    def test_pairs_masks_by_file_name(self, tmp_path: Path, rng: np.random.Generator):
        (tmp_path / "pred").mkdir()
        (tmp_path / "gt").mkdir()
        for subject_id in ("sub-001", "sub-002"):
            gt = random_mask(rng, (8, 8))
            write_rvol(gt, tmp_path / "gt" / subject_id)
            write_rvol(gt, tmp_path / "pred" / subject_id)

        report = evaluate_directory(tmp_path / "pred", tmp_path / "gt")

        assert [subject.subject_id for subject in report.subjects] == ["sub-001", "sub-002"]
        assert report.summary("dice").mean == pytest.approx(1.0)
        assert report.summary("hd95").mean == pytest.approx(0.0)

    def test_missing_prediction_is_reported(self, tmp_path: Path, rng: np.random.Generator):
        (tmp_path / "pred").mkdir()
        (tmp_path / "gt").mkdir()
        write_rvol(random_mask(rng, (4, 4)), tmp_path / "gt" / "sub-001")

        with pytest.raises(MetricsError, match="Missing prediction"):
            evaluate_directory(tmp_path / "pred", tmp_path / "gt")
