import numpy as np
from numpy.typing import ArrayLike, NDArray

from src.volume.errors import InvalidVolumeError

SUPPORTED_DIMENSIONS = (2, 3)


def _freeze(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


class Volume:
    def __init__(
        self,
        data: ArrayLike,
        *,
        spacing: tuple[float, ...] | None = None,
    ):
        """Initialize a real-valued image grid.

        Args:
            data: Real scalars with 2 or 3 axes (row-major)
            spacing: Physical size of a voxel per axis (default: 1.0 on every axis)
        """
        self._data = _freeze(self._validate_data(data))
        self._spacing = self._validate_spacing(spacing)

    def _validate_data(self, data: ArrayLike) -> NDArray[np.float64]:
        array = np.array(data, dtype=np.float64)

        if array.ndim not in SUPPORTED_DIMENSIONS:
            raise InvalidVolumeError(
                f"Volume must have {SUPPORTED_DIMENSIONS} axes, got {array.ndim}"
            )
        if array.size == 0:
            raise InvalidVolumeError(f"Volume shape must be positive, got {array.shape}")
        if not np.all(np.isfinite(array)):
            raise InvalidVolumeError("Volume contains NaN or Inf values")

        return array

    def _validate_spacing(self, spacing: tuple[float, ...] | None) -> tuple[float, ...]:
        if spacing is None:
            return (1.0,) * self._data.ndim

        spacing = tuple(float(axis) for axis in spacing)
        if len(spacing) != self._data.ndim:
            raise InvalidVolumeError(
                f"Spacing must have {self._data.ndim} entries, got {len(spacing)}"
            )
        if any(axis <= 0 or not np.isfinite(axis) for axis in spacing):
            raise InvalidVolumeError(f"Spacing must be positive, got {spacing}")

        return spacing

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self._data.shape)

    @property
    def ndim(self) -> int:
        return self._data.ndim

    @property
    def size(self) -> int:
        return int(self._data.size)

    @property
    def spacing(self) -> tuple[float, ...]:
        return self._spacing

    def __repr__(self) -> str:
        return f"{type(self).__name__}(shape={self.shape}, spacing={self._spacing})"


class Mask(Volume):
    """Binary annotation carrier; voxels are exactly 0 or 1."""

    def _validate_data(self, data: ArrayLike) -> NDArray[np.uint8]:
        array = np.asarray(data)

        if array.dtype == np.bool_:
            array = array.astype(np.uint8)
        elif not np.all(np.isin(array, (0, 1))):
            raise InvalidVolumeError("Mask values must be exactly 0 or 1")

        array = np.array(array, dtype=np.uint8)
        if array.ndim not in SUPPORTED_DIMENSIONS:
            raise InvalidVolumeError(
                f"Mask must have {SUPPORTED_DIMENSIONS} axes, got {array.ndim}"
            )
        if array.size == 0:
            raise InvalidVolumeError(f"Mask shape must be positive, got {array.shape}")

        return array

    @property
    def foreground(self) -> NDArray[np.bool_]:
        return self._data.astype(bool)

    @property
    def voxel_count(self) -> int:
        return int(np.count_nonzero(self._data))

    @property
    def is_empty(self) -> bool:
        return self.voxel_count == 0


class Spectrum:
    """Complex spectrum stored with the zero frequency at floor(shape / 2)."""

    def __init__(self, data: ArrayLike):
        array = np.array(data, dtype=np.complex128)

        if array.ndim not in SUPPORTED_DIMENSIONS:
            raise InvalidVolumeError(
                f"Spectrum must have {SUPPORTED_DIMENSIONS} axes, got {array.ndim}"
            )
        if not np.all(np.isfinite(array)):
            raise InvalidVolumeError("Spectrum contains NaN or Inf values")

        self._data = _freeze(array)

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self._data.shape)

    @property
    def size(self) -> int:
        return int(self._data.size)

    @property
    def center(self) -> tuple[int, ...]:
        return tuple(axis // 2 for axis in self._data.shape)

    def energy(self) -> float:
        return float(np.sum(np.abs(self._data) ** 2))

    def __repr__(self) -> str:
        return f"Spectrum(shape={self.shape})"
