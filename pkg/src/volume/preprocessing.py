import numpy as np
from scipy.ndimage import map_coordinates

from src.volume.errors import DegenerateRangeError, InvalidVolumeError
from src.volume.volume import Volume


def minmax_normalize(volume: Volume) -> Volume:
    """Affine map of the volume onto [0, 1]; min goes to 0 and max to 1."""
    low = float(np.min(volume.data))
    high = float(np.max(volume.data))

    if high <= low:
        raise DegenerateRangeError("degenerate range", value=low)

    normalized = (volume.data - low) / (high - low)
    return Volume(normalized, spacing=volume.spacing)


def resize(volume: Volume, target_shape: tuple[int, ...]) -> Volume:
    """(Bi/tri)linear resampling with half-pixel-center alignment.

    Sample positions outside the source grid are clamped to the border voxels.
    The physical extent is kept, so the spacing scales with the shape ratio.
    """
    target_shape = tuple(int(axis) for axis in target_shape)
    if len(target_shape) != volume.ndim:
        raise InvalidVolumeError(
            f"Target shape {target_shape} does not match a {volume.ndim}D volume"
        )
    if any(axis <= 0 for axis in target_shape):
        raise InvalidVolumeError(f"Target shape must be positive, got {target_shape}")

    if target_shape == volume.shape:
        return Volume(volume.data.copy(), spacing=volume.spacing)

    axes = [
        (np.arange(target, dtype=np.float64) + 0.5) * (source / target) - 0.5
        for source, target in zip(volume.shape, target_shape, strict=True)
    ]
    coordinates = np.stack(np.meshgrid(*axes, indexing="ij"))

    resampled = map_coordinates(volume.data, coordinates, order=1, mode="nearest")
    spacing = tuple(
        step * source / target
        for step, source, target in zip(
            volume.spacing, volume.shape, target_shape, strict=True
        )
    )
    return Volume(resampled, spacing=spacing)
