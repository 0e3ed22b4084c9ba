"""Discrete Fourier transforms with the centered-spectrum convention.

Spectra are stored fftshift-ed so that the zero frequency sits at
``floor(shape / 2)`` on every axis. The forward transform is unnormalized and
the inverse carries the 1/N factor.
"""

import logging

import numpy as np

from src.config.config import settings
from src.volume.volume import Spectrum, Volume
from src.volume.volume_dtos import InverseTransform


def dft_forward(volume: Volume) -> Spectrum:
    """Centered complex spectrum of a real volume (float64 accumulation)."""
    transformed = np.fft.fftn(volume.data.astype(np.float64))
    return Spectrum(np.fft.fftshift(transformed))


def centered_inverse(data: np.ndarray) -> np.ndarray:
    """Complex inverse of a centered spectrum array, any shape."""
    return np.fft.ifftn(np.fft.ifftshift(np.asarray(data, dtype=np.complex128)))


def dft_inverse(
    spectrum: Spectrum, *, spacing: tuple[float, ...] | None = None
) -> InverseTransform:
    """Inverse transform keeping the real part and reporting the imaginary residual."""
    inverted = centered_inverse(spectrum.data)
    imaginary_residual = float(np.max(np.abs(inverted.imag)))

    scale = float(np.max(np.abs(inverted.real)))
    if imaginary_residual > settings.fourier.imaginary_residual_warning * max(scale, 1.0):
        logging.debug(
            f"Inverse transform of {spectrum.shape} dropped an imaginary residual "
            f"of {imaginary_residual:.3e}"
        )

    return InverseTransform(
        volume=Volume(inverted.real, spacing=spacing),
        imaginary_residual=imaginary_residual,
    )


def relative_l2_error(actual: np.ndarray, expected: np.ndarray) -> float:
    """||actual - expected|| / ||expected|| (absolute error when expected is zero)."""
    difference = float(np.linalg.norm(np.ravel(actual) - np.ravel(expected)))
    reference = float(np.linalg.norm(np.ravel(expected)))
    return difference / reference if reference > 0 else difference
