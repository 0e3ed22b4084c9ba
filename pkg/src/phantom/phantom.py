"""Synthetic multimodal subjects: one anatomy, one contrast per modality.

Each subject has a midbrain disk with a smooth tissue texture and two small
ellipsoidal nuclei (the segmentation target). Every modality applies its own
monotone intensity map to the shared tissue levels and multiplies by its own
bias field. A shading field shared by the subject is added with the sign of the
map, then Gaussian noise. Both fields are confined to the low frequency band.
"""

import logging
import math

import numpy as np
from scipy.ndimage import binary_dilation, gaussian_filter

from src.config.config import settings
from src.disentangle.disentangle import band_limit
from src.disentangle.disentangle_dtos import SplitConfig
from src.phantom.errors import DegenerateGeometryError
from src.phantom.phantom_dtos import (
    AnatomyParams,
    DiagnosticClass,
    ModalityTransfer,
    PhantomSpec,
    PhantomSubject,
)
from src.utils.seeding import derive_seed
from src.volume.preprocessing import minmax_normalize
from src.volume.volume import Mask, Volume

_UNIT_BALL_VOLUME = {2: math.pi, 3: 4 * math.pi / 3}
_BIAS_WIDTH_RANGE = (0.2, 0.5)


def _ellipsoid(coordinates: np.ndarray, center: np.ndarray, semi_axes: np.ndarray) -> np.ndarray:
    per_axis = (-1,) + (1,) * (coordinates.ndim - 1)
    offsets = (coordinates - center.reshape(per_axis)) / semi_axes.reshape(per_axis)
    return np.sum(offsets**2, axis=0) <= 1.0


def brain_region(shape: tuple[int, ...], anatomy: AnatomyParams) -> np.ndarray:
    coordinates = np.indices(shape, dtype=np.float64)
    center = (np.array(shape, dtype=np.float64) - 1) / 2
    radius = anatomy.brain_radius * min(shape) / 2
    return _ellipsoid(coordinates, center, np.full(len(shape), radius))


def sample_nuclei(
    shape: tuple[int, ...],
    anatomy: AnatomyParams,
    diagnostic_class: DiagnosticClass,
    rng: np.random.Generator,
) -> list[np.ndarray]:
    """Two ellipsoids placed left and right of the midline along the last axis."""
    ndim = len(shape)
    coordinates = np.indices(shape, dtype=np.float64)
    grid = np.array(shape, dtype=np.float64)
    size_factor = anatomy.class_size_factors.get(diagnostic_class, 1.0)

    nuclei = []
    for side in (-1, 1):
        fraction = rng.uniform(*anatomy.nucleus_fraction) * size_factor
        radius = (fraction * math.prod(shape) / _UNIT_BALL_VOLUME[ndim]) ** (1 / ndim)
        stretch = rng.uniform(*anatomy.nucleus_aspect, size=ndim)
        stretch /= np.prod(stretch) ** (1 / ndim)

        center = (grid - 1) / 2
        center[-1] += side * anatomy.lateral_offset * shape[-1]
        center += rng.normal(0.0, anatomy.center_jitter, size=ndim) * grid

        nuclei.append(_ellipsoid(coordinates, center, radius * stretch))
    return nuclei


def geometry_problem(nuclei: list[np.ndarray], brain: np.ndarray) -> str | None:
    """Reason the nuclei are unusable, or None when the geometry is valid."""
    interior = np.zeros_like(brain)
    interior[tuple(slice(1, -1) for _ in brain.shape)] = True

    for nucleus in nuclei:
        if not nucleus.any():
            return "empty nucleus"
        if np.any(nucleus & ~interior):
            return "nucleus outside field"
        if np.any(nucleus & ~brain):
            return "nucleus outside midbrain"

    if np.any(binary_dilation(nuclei[0]) & nuclei[1]):
        return "nuclei touch"

    fraction = np.count_nonzero(np.logical_or.reduce(nuclei)) / brain.size
    if not settings.phantom.min_mask_fraction <= fraction <= settings.phantom.max_mask_fraction:
        return f"mask fraction {fraction:.4f} out of range"
    return None


def tissue_levels(
    mask: np.ndarray, brain: np.ndarray, anatomy: AnatomyParams, rng: np.random.Generator
) -> np.ndarray:
    """Shared tissue map in [0, 1]: background 0, textured midbrain, bright nuclei."""
    texture = gaussian_filter(rng.standard_normal(mask.shape), anatomy.texture_sigma)
    peak = np.max(np.abs(texture))
    if peak > 0:
        texture = texture / peak

    tissue = np.zeros(mask.shape, dtype=np.float64)
    tissue[brain] = anatomy.brain_level + anatomy.texture_amplitude * texture[brain]
    tissue[mask] = anatomy.nucleus_level
    if anatomy.edge_sigma > 0:
        tissue = gaussian_filter(tissue, anatomy.edge_sigma)
    return np.clip(tissue, 0.0, 1.0)


def _band_limited_bumps(
    shape: tuple[int, ...], bumps: int, theta: float, rng: np.random.Generator
) -> np.ndarray:
    """Sum of random Gaussian bumps, band limited to ``theta`` and scaled to peak 1."""
    coordinates = np.indices(shape, dtype=np.float64)
    field = np.zeros(shape, dtype=np.float64)
    for _ in range(bumps):
        center = rng.uniform(0, np.array(shape, dtype=np.float64))
        width = rng.uniform(*_BIAS_WIDTH_RANGE) * min(shape)
        amplitude = rng.uniform(-1.0, 1.0)
        squared = sum(
            (axis - position) ** 2 for axis, position in zip(coordinates, center, strict=True)
        )
        field += amplitude * np.exp(-squared / (2 * width**2))

    limited = band_limit(Volume(field), SplitConfig(theta=theta)).data
    peak = np.max(np.abs(limited))
    return limited / peak if peak > 0 else limited


def bias_field(
    shape: tuple[int, ...],
    transfer: ModalityTransfer,
    theta: float,
    rng: np.random.Generator,
) -> Volume:
    """Multiplicative field ``1 + amplitude * f`` with f band limited and |f| <= 1."""
    limited = _band_limited_bumps(shape, transfer.bias_bumps, theta, rng)
    return Volume(1.0 + transfer.bias_amplitude * limited)


def shading_field(
    shape: tuple[int, ...], anatomy: AnatomyParams, theta: float, rng: np.random.Generator
) -> Volume:
    """Additive shading shared by every modality of a subject, with |f| <= 1."""
    return Volume(_band_limited_bumps(shape, anatomy.shading_bumps, theta, rng))


def render_modality(
    tissue: np.ndarray,
    transfer: ModalityTransfer,
    bias: Volume,
    snr: float,
    rng: np.random.Generator,
    spacing: tuple[float, ...] | None = None,
    shading: np.ndarray | None = None,
) -> Volume:
    """Monotone map times bias, plus signed shading and noise, minmax normalized.

    ``shading`` is in units of the transfer gain. Its sign follows the transfer
    direction, so it never flips the correlation between two modalities.
    """
    noise_sigma = transfer.gain / snr
    raw = transfer.intensity(tissue) * bias.data + rng.normal(0.0, noise_sigma, tissue.shape)
    if shading is not None:
        sign = 1.0 if transfer.direction == "increasing" else -1.0
        raw = raw + sign * transfer.gain * shading
    return minmax_normalize(Volume(raw, spacing=spacing))


def generate_subject(
    spec: PhantomSpec,
    subject_seed: int,
    diagnostic_class: DiagnosticClass = DiagnosticClass.HEALTHY,
    *,
    subject_id: str | None = None,
    max_attempts: int | None = None,
) -> PhantomSubject:
    """Generate all modalities of one subject deterministically from its seed.

    Args:
        spec: Grid, anatomy and modality transfer parameters
        subject_seed: Seed of this subject (combined with spec.seed)
        diagnostic_class: Scales the nucleus size
        subject_id: Identifier stored on the subject (default: "sub-<seed>")
        max_attempts: Geometry sub-seeds to try (default: settings.phantom.max_geometry_attempts)
    """
    max_attempts = (
        max_attempts if max_attempts is not None else settings.phantom.max_geometry_attempts
    )
    subject_id = subject_id if subject_id is not None else f"sub-{subject_seed}"
    brain = brain_region(spec.shape, spec.anatomy)

    for attempt in range(max_attempts):
        rng = np.random.default_rng(derive_seed(spec.seed, subject_seed, attempt))
        nuclei = sample_nuclei(spec.shape, spec.anatomy, diagnostic_class, rng)
        problem = geometry_problem(nuclei, brain)
        if problem is None:
            break
        logging.info(f"[subject={subject_id}] geometry attempt {attempt + 1} rejected: {problem}")
    else:
        raise DegenerateGeometryError(
            f"No valid nucleus geometry for {subject_id}", attempts=max_attempts
        )

    mask = np.logical_or.reduce(nuclei)
    tissue = tissue_levels(mask, brain, spec.anatomy, rng)
    shading = shading_field(spec.shape, spec.anatomy, spec.bias_theta, rng)

    volumes, bias_fields, snr = {}, {}, {}
    for index, transfer in enumerate(spec.transfers):
        modality_rng = np.random.default_rng(
            derive_seed(spec.seed, subject_seed, attempt, index + 1)
        )
        bias = bias_field(spec.shape, transfer, spec.bias_theta, modality_rng)
        snr[transfer.modality] = float(modality_rng.uniform(*transfer.snr_range))
        bias_fields[transfer.modality] = bias
        volumes[transfer.modality] = render_modality(
            tissue,
            transfer,
            bias,
            snr[transfer.modality],
            modality_rng,
            spec.spacing,
            shading=spec.anatomy.shading_amplitude * shading.data,
        )

    logging.debug(
        f"[subject={subject_id}] generated after {attempt + 1} attempt(s), "
        f"mask fraction {np.count_nonzero(mask) / mask.size:.4f}"
    )
    return PhantomSubject(
        subject_id=subject_id,
        diagnostic_class=diagnostic_class,
        seed=subject_seed,
        attempts=attempt + 1,
        volumes=volumes,
        mask=Mask(mask, spacing=spec.spacing),
        brain_mask=Mask(brain, spacing=spec.spacing),
        bias_fields=bias_fields,
        shading=Volume(shading.data, spacing=spec.spacing),
        snr=snr,
    )
