"""Fourier-domain disentangling of an image into low- and high-frequency parts.

The low-frequency part is the centered block of the (centered) spectrum whose
per-axis bounds are ``[round(S(1-theta)/2), round(S(1+theta)/2))``; the
high-frequency part is the full spectrum with that block zeroed. The two parts
sum back to the original spectrum exactly.
"""

import math

import numpy as np

from src.disentangle.disentangle_dtos import FrequencySplit, SplitConfig
from src.volume.fourier import dft_forward, dft_inverse
from src.volume.volume import Spectrum, Volume


def split(
    spectrum: Spectrum,
    config: SplitConfig,
    *,
    spacing: tuple[float, ...] | None = None,
) -> FrequencySplit:
    slices = config.crop_slices(spectrum.shape)

    low_block = spectrum.data[slices].copy()
    low_block.setflags(write=False)

    high = spectrum.data.copy()
    high[slices] = 0

    return FrequencySplit(
        low_block=low_block,
        high_spectrum=Spectrum(high),
        config=config,
        source_shape=spectrum.shape,
        source_spacing=spacing if spacing is not None else (1.0,) * len(spectrum.shape),
    )


def split_volume(volume: Volume, config: SplitConfig) -> FrequencySplit:
    return split(dft_forward(volume), config, spacing=volume.spacing)


def reassemble(frequency_split: FrequencySplit) -> Spectrum:
    """Write the low block back into the high spectrum."""
    spectrum = frequency_split.high_spectrum.data.copy()
    spectrum[frequency_split.crop_slices] = frequency_split.low_block
    return Spectrum(spectrum)


def high_image(frequency_split: FrequencySplit) -> Volume:
    return dft_inverse(
        frequency_split.high_spectrum, spacing=frequency_split.source_spacing
    ).volume


def low_image(frequency_split: FrequencySplit) -> Volume:
    """Inverse of the low block taken as a standalone spectrum.

    The block is rolled so its zero frequency sits at index 0 before the inverse;
    with rounded crop bounds that position is not always ``floor(L / 2)``. The
    result has the crop shape and is rescaled by crop size / source size so
    intensities are preserved, which makes it a downsampled copy of the input's
    low-pass content.
    """
    crop_shape = frequency_split.crop_shape
    scale = math.prod(crop_shape) / math.prod(frequency_split.source_shape)
    block = np.roll(
        frequency_split.low_block,
        tuple(-index for index in frequency_split.zero_frequency_index),
        axis=tuple(range(len(crop_shape))),
    )
    inverted = np.fft.ifftn(block).real * scale

    spacing = tuple(
        step * source / crop
        for step, source, crop in zip(
            frequency_split.source_spacing,
            frequency_split.source_shape,
            crop_shape,
            strict=True,
        )
    )
    return Volume(inverted, spacing=spacing)


def pad_and_invert(frequency_split: FrequencySplit) -> Volume:
    """Zero-pad the low block to the source shape and invert it (visualization form)."""
    padded = np.zeros(frequency_split.source_shape, dtype=np.complex128)
    padded[frequency_split.crop_slices] = frequency_split.low_block
    return dft_inverse(Spectrum(padded), spacing=frequency_split.source_spacing).volume


def symmetric_band(shape: tuple[int, ...], config: SplitConfig) -> np.ndarray:
    """Boolean mask of the largest block inside the crop that is symmetric about DC.

    A spectrum restricted to this mask stays Hermitian, so its inverse is real
    and all of its energy lies inside the crop region.
    """
    band = np.ones(shape, dtype=bool)
    for axis, ((start, end), size) in enumerate(
        zip(config.crop_bounds(shape), shape, strict=True)
    ):
        center = size // 2
        radius = min(center - start, end - 1 - center)
        offsets = np.abs(np.arange(size) - center)
        axis_mask = offsets <= max(radius, 0)
        band &= np.expand_dims(axis_mask, tuple(i for i in range(len(shape)) if i != axis))
    return band


def band_limit(volume: Volume, config: SplitConfig) -> Volume:
    """Keep only the symmetric low band of a volume's spectrum."""
    spectrum = dft_forward(volume)
    limited = spectrum.data * symmetric_band(spectrum.shape, config)
    return dft_inverse(Spectrum(limited), spacing=volume.spacing).volume
