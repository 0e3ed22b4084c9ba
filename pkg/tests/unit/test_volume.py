"""Unit tests for volumes, centered transforms, preprocessing and RVOL files."""

import logging

import numpy as np
import pytest

from src.volume.errors import DegenerateRangeError, InvalidVolumeError, RvolFormatError
from src.volume.fourier import dft_forward, dft_inverse, relative_l2_error
from src.volume.preprocessing import minmax_normalize, resize
from src.volume.rvol_io import payload_path, read_header, read_mask, read_volume, write_rvol
from src.volume.volume import Mask, Spectrum, Volume


class TestVolumeValidation:
    def test_rejects_unsupported_dimensions(self):
        with pytest.raises(InvalidVolumeError):
            Volume(np.zeros(8))
        with pytest.raises(InvalidVolumeError):
            Volume(np.zeros((2, 2, 2, 2)))

    def test_rejects_non_finite_values(self):
        data = np.ones((4, 4))
        data[1, 2] = np.nan
        with pytest.raises(InvalidVolumeError):
            Volume(data)

    def test_rejects_spacing_of_wrong_length_or_sign(self):
        with pytest.raises(InvalidVolumeError):
            Volume(np.ones((4, 4)), spacing=(1.0,))
        with pytest.raises(InvalidVolumeError):
            Volume(np.ones((4, 4)), spacing=(1.0, -2.0))

    def test_default_spacing_is_one_per_axis(self):
        assert Volume(np.ones((2, 3, 4))).spacing == (1.0, 1.0, 1.0)

    def test_data_is_read_only(self):
        volume = Volume(np.ones((4, 4)))
        with pytest.raises(ValueError):
            volume.data[0, 0] = 2.0

    def test_mask_accepts_booleans_and_rejects_other_values(self):
        mask = Mask(np.eye(4, dtype=bool))
        assert mask.voxel_count == 4
        assert mask.data.dtype == np.uint8

        with pytest.raises(InvalidVolumeError):
            Mask(np.full((4, 4), 2))

    def test_empty_mask_is_reported(self):
        assert Mask(np.zeros((3, 3), dtype=np.uint8)).is_empty


class TestCenteredTransform:
    def test_round_trip_reproduces_random_volume(self, rng: np.random.Generator):
        volume = Volume(rng.standard_normal((16, 16)))

        restored = dft_inverse(dft_forward(volume)).volume

        error = relative_l2_error(restored.data, volume.data)
        assert error <= 1e-6, f"Round trip relative L2 error {error:.3e} exceeds 1e-6"

    def test_randomized_round_trip_suite(self, rng: np.random.Generator):
        for case in range(100):
            ndim = 2 if case % 2 == 0 else 3
            shape = tuple(int(size) for size in rng.integers(1, 33 if ndim == 2 else 17, ndim))
            volume = Volume(rng.standard_normal(shape) * 10.0 ** rng.integers(-3, 4))

            restored = dft_inverse(dft_forward(volume)).volume

            error = relative_l2_error(restored.data, volume.data)
            assert error <= 1e-6, f"Case {case} shape {shape}: round trip error {error:.3e}"

    def test_parseval_identity(self, rng: np.random.Generator):
        volume = Volume(rng.standard_normal((8, 8, 8)))
        spectrum = dft_forward(volume)

        spatial_energy = float(np.sum(volume.data**2))
        spectral_energy = spectrum.energy() / volume.size

        assert abs(spatial_energy - spectral_energy) <= 1e-6 * spatial_energy

    def test_linearity(self, rng: np.random.Generator):
        u = Volume(rng.standard_normal((12, 10)))
        v = Volume(rng.standard_normal((12, 10)))
        a, b = 2.5, -0.75

        combined = dft_forward(Volume(a * u.data + b * v.data)).data
        separate = a * dft_forward(u).data + b * dft_forward(v).data

        assert relative_l2_error(combined, separate) <= 1e-6

    def test_zero_frequency_sits_at_floor_half_shape(self):
        volume = Volume(np.full((5, 6), 2.0))

        spectrum = dft_forward(volume)

        assert spectrum.center == (2, 3)
        assert spectrum.data[2, 3] == pytest.approx(2.0 * 30)
        off_center = spectrum.data.copy()
        off_center[2, 3] = 0
        assert np.max(np.abs(off_center)) < 1e-9

    def test_real_volume_has_negligible_imaginary_residual(self, rng: np.random.Generator):
        volume = Volume(rng.standard_normal((16, 16)) * 100)

        inverse = dft_inverse(dft_forward(volume))

        assert inverse.imaginary_residual <= 1e-9 * np.max(np.abs(volume.data))

    def test_inverse_keeps_requested_spacing(self, rng: np.random.Generator):
        volume = Volume(rng.random((4, 4)), spacing=(0.5, 2.0))

        inverse = dft_inverse(dft_forward(volume), spacing=volume.spacing)

        assert inverse.volume.spacing == (0.5, 2.0)

    def test_spectrum_rejects_non_finite_values(self):
        with pytest.raises(InvalidVolumeError):
            Spectrum(np.array([[np.inf, 0], [0, 0]], dtype=complex))

    def test_asymmetric_low_crop_reports_imaginary_residual(self, rng: np.random.Generator):
        spectrum = dft_forward(Volume(rng.standard_normal((8, 8))))
        box = np.zeros(spectrum.shape)
        box[4:7, 4:7] = 1.0

        inverse = dft_inverse(Spectrum(spectrum.data * box))

        assert inverse.imaginary_residual > 1e-6

    def test_large_imaginary_residual_is_logged(
        self, rng: np.random.Generator, caplog: pytest.LogCaptureFixture
    ):
        spectrum = dft_forward(Volume(rng.standard_normal((8, 8))))
        box = np.zeros(spectrum.shape)
        box[4:7, 4:7] = 1.0

        with caplog.at_level(logging.DEBUG):
            dft_inverse(Spectrum(spectrum.data * box))

        assert "dropped an imaginary residual" in caplog.text


class TestMinmaxNormalize:
    def test_maps_extremes_to_zero_and_one(self, rng: np.random.Generator):
        volume = Volume(rng.uniform(-5, 7, (8, 8)))

        normalized = minmax_normalize(volume)

        assert normalized.data.min() == 0.0
        assert normalized.data.max() == 1.0

    def test_normalized_volume_is_unchanged(self, rng: np.random.Generator):
        data = rng.random((6, 6))
        data[0, 0], data[-1, -1] = 0.0, 1.0

        normalized = minmax_normalize(Volume(data))

        np.testing.assert_allclose(normalized.data, data, atol=1e-12)

    def test_constant_volume_raises_degenerate_range(self):
        with pytest.raises(DegenerateRangeError, match="degenerate range"):
            minmax_normalize(Volume(np.full((4, 4), 3.0)))

    def test_preserves_voxel_order(self, rng: np.random.Generator):
        data = rng.uniform(-3, 9, (7, 9))

        normalized = minmax_normalize(Volume(data)).data

        np.testing.assert_array_equal(
            np.argsort(normalized, axis=None), np.argsort(data, axis=None)
        )


class TestResize:
    def test_checkerboard_upsampling_matches_bilinear_weights(self):
        checkerboard = Volume(np.array([[0.0, 1.0], [1.0, 0.0]]))

        resized = resize(checkerboard, (4, 4))

        expected = np.array(
            [
                [0.0, 0.25, 0.75, 1.0],
                [0.25, 0.375, 0.625, 0.75],
                [0.75, 0.625, 0.375, 0.25],
                [1.0, 0.75, 0.25, 0.0],
            ]
        )
        np.testing.assert_allclose(resized.data, expected, atol=1e-12)

    def test_spacing_scales_with_shape_ratio(self):
        volume = Volume(np.ones((4, 8)), spacing=(1.0, 2.0))

        resized = resize(volume, (8, 4))

        assert resized.spacing == (0.5, 4.0)

    def test_same_shape_returns_copy(self, sample_volume: Volume):
        resized = resize(sample_volume, sample_volume.shape)

        np.testing.assert_array_equal(resized.data, sample_volume.data)

    def test_rejects_mismatched_dimensionality(self, sample_volume: Volume):
        with pytest.raises(InvalidVolumeError):
            resize(sample_volume, (4, 4, 4))

    @pytest.mark.parametrize("target_shape", [(3, 5), (16, 7), (9, 9)])
    def test_constant_volume_stays_constant(self, target_shape):
        volume = Volume(np.full((6, 6), 2.5))

        resized = resize(volume, target_shape)

        assert resized.shape == target_shape
        np.testing.assert_allclose(resized.data, 2.5, atol=1e-12)


class TestRvolFiles:
    def test_volume_round_trip_in_float32(self, tmp_path, rng: np.random.Generator):
        volume = Volume(rng.standard_normal((5, 6, 7)), spacing=(0.8, 0.8, 1.5))

        header_path = write_rvol(volume, tmp_path / "qsm")
        restored = read_volume(header_path)

        assert header_path.name == "qsm.rvol"
        assert restored.spacing == volume.spacing
        np.testing.assert_allclose(restored.data, volume.data.astype(np.float32), rtol=0)

    def test_mask_round_trip_is_exact(self, tmp_path):
        mask = Mask(np.eye(6, dtype=bool))

        write_rvol(mask, tmp_path / "mask")
        restored = read_mask(tmp_path / "mask.rvol")

        assert read_header(tmp_path / "mask").dtype == "u8"
        np.testing.assert_array_equal(restored.data, mask.data)

    def test_payload_size_mismatch_is_rejected(self, tmp_path):
        write_rvol(Volume(np.ones((4, 4))), tmp_path / "volume")
        payload_path(tmp_path / "volume").write_bytes(b"\x00" * 12)

        with pytest.raises(RvolFormatError):
            read_volume(tmp_path / "volume")

    def test_missing_header_is_rejected(self, tmp_path):
        with pytest.raises(RvolFormatError, match="not found"):
            read_volume(tmp_path / "absent")

    def test_float_volume_cannot_be_read_as_mask(self, tmp_path):
        write_rvol(Volume(np.ones((4, 4))), tmp_path / "volume")

        with pytest.raises(RvolFormatError, match="u8"):
            read_mask(tmp_path / "volume")
