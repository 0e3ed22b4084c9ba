"""Smoke tests for the freqfuse command line."""

from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from src.cli.cli import EXIT_ERROR, EXIT_OK, EXIT_UNDEFINED, main
from src.phantom.cohort import load_manifest
from src.phantom.phantom_dtos import PhantomSpec
from src.volume.rvol_io import read_volume, write_rvol
from src.volume.volume import Mask, Volume
from tests.conftest import FIXTURES_DIR, blob_mask


@pytest.fixture
def spec_file(tmp_path: Path) -> Path:
    path = tmp_path / "spec.json"
    path.write_text(PhantomSpec(shape=(32, 32), seed=4).model_dump_json())
    return path


class TestGen:
    def test_writes_a_cohort(self, tmp_path: Path, spec_file: Path):
        out = tmp_path / "cohort"

        code = main(
            ["gen", "--spec", str(spec_file), "--n", "5", "--out", str(out),
             "--split", "0.6", "0.2", "0.2", "--seed", "9"]
        )

        manifest = load_manifest(out)
        assert code == EXIT_OK
        assert len(manifest.subjects) == 5
        assert manifest.spec.seed == 9

    def test_too_small_cohort_exits_with_error(self, tmp_path: Path, spec_file: Path):
        code = main(
            ["gen", "--spec", str(spec_file), "--n", "2", "--out", str(tmp_path / "cohort"),
             "--split", "0.6", "0.2", "0.2"]
        )

        assert code == EXIT_ERROR


class TestDisentangle:
    def test_writes_the_three_frequency_parts(self, tmp_path: Path, rng: np.random.Generator):
        write_rvol(Volume(rng.random((32, 32))), tmp_path / "input")

        code = main(
            ["disentangle", "--input", str(tmp_path / "input.rvol"), "--theta", "0.25",
             "--out-prefix", str(tmp_path / "parts")]
        )

        assert code == EXIT_OK
        assert read_volume(tmp_path / "parts_high.rvol").shape == (32, 32)
        assert read_volume(tmp_path / "parts_low.rvol").shape == (8, 8)
        assert read_volume(tmp_path / "parts_lowpad.rvol").shape == (32, 32)

    def test_missing_input_exits_with_error(self, tmp_path: Path):
        code = main(
            ["disentangle", "--input", str(tmp_path / "absent.rvol"),
             "--out-prefix", str(tmp_path / "parts")]
        )

        assert code == EXIT_ERROR

    def test_theta_too_small_exits_with_error(self, tmp_path: Path):
        write_rvol(Volume(np.ones((16, 16))), tmp_path / "input")

        code = main(
            ["disentangle", "--input", str(tmp_path / "input.rvol"), "--theta", "0.01",
             "--out-prefix", str(tmp_path / "parts")]
        )

        assert code == EXIT_ERROR


class TestEval:
    def write_pairs(self, root: Path, gt_masks: list[Mask]) -> tuple[Path, Path]:
        pred_dir, gt_dir = root / "pred", root / "gt"
        pred_dir.mkdir()
        gt_dir.mkdir()
        for index, gt in enumerate(gt_masks):
            write_rvol(gt, gt_dir / f"sub-{index:03d}")
            write_rvol(blob_mask((16, 16), (8.0, 8.0), 3.0), pred_dir / f"sub-{index:03d}")
        return pred_dir, gt_dir

    def test_writes_the_metrics_report(self, tmp_path: Path):
        pred_dir, gt_dir = self.write_pairs(
            tmp_path, [blob_mask((16, 16), (8.0, 8.0), 3.0), blob_mask((16, 16), (7.0, 8.0), 3.0)]
        )
        out = tmp_path / "metrics.csv"

        code = main(["eval", "--pred", str(pred_dir), "--gt", str(gt_dir), "--out", str(out)])

        frame = pd.read_csv(out, index_col="subject_id")
        assert code == EXIT_OK
        assert frame.loc["sub-000", "dice"] == pytest.approx(1.0)
        assert frame.loc["sub-001", "dice"] < 1.0
        assert list(frame.index[-2:]) == ["mean", "sem"]

    def test_undefined_cohort_exits_with_two(self, tmp_path: Path):
        empty = Mask(np.zeros((16, 16), dtype=np.uint8))
        pred_dir, gt_dir = self.write_pairs(tmp_path, [empty, empty])

        code = main(
            ["eval", "--pred", str(pred_dir), "--gt", str(gt_dir),
             "--out", str(tmp_path / "metrics.csv")]
        )

        assert code == EXIT_UNDEFINED

    def test_missing_ground_truth_exits_with_error(self, tmp_path: Path):
        (tmp_path / "empty").mkdir()

        code = main(
            ["eval", "--pred", str(tmp_path), "--gt", str(tmp_path / "empty"),
             "--out", str(tmp_path / "metrics.csv")]
        )

        assert code == EXIT_ERROR


class TestReport:
    def test_renders_markdown_from_a_result_csv(self, tmp_path: Path):
        code = main(
            ["report", "--results", str(FIXTURES_DIR / "published_combo_table.csv"),
             "--out", str(tmp_path)]
        )

        text = (tmp_path / "published_combo_table.md").read_text()
        assert code == EXIT_OK
        assert "iMag+R2*+SWI" in text
        assert "R2*" in text


def test_unknown_command_is_rejected():
    with pytest.raises(SystemExit):
        main(["unknown"])
