"""Data Transfer Objects (DTOs) for phantom specifications, subjects and cohort manifests."""

try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        __str__ = str.__str__
        __format__ = str.__format__
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.config.config import settings
from src.utils.modality import Modality
from src.volume.volume import Mask, Volume

SplitName = Literal["train", "val", "test"]
SPLIT_NAMES: tuple[SplitName, ...] = ("train", "val", "test")


class DiagnosticClass(StrEnum):
    HEALTHY = "healthy"
    EARLY_PD = "early_pd"
    IRBD = "irbd"


class AnatomyParams(BaseModel):
    """Geometry shared by every modality of a subject. Lengths are fractions of the grid."""

    model_config = ConfigDict(frozen=True)

    brain_radius: float = Field(
        default=0.8, gt=0, le=1, description="Midbrain disk radius relative to half the grid"
    )
    brain_level: float = Field(default=0.4, gt=0, lt=1, description="Tissue level of the midbrain")
    texture_amplitude: float = Field(
        default=0.12, ge=0, lt=0.5, description="Peak deviation of the shared tissue texture"
    )
    texture_sigma: float = Field(default=3.0, gt=0, description="Texture smoothing in voxels")
    nucleus_level: float = Field(default=1.0, gt=0, le=1)
    nucleus_fraction: tuple[float, float] = Field(
        default=(0.004, 0.012), description="Voxel fraction range of one nucleus"
    )
    nucleus_aspect: tuple[float, float] = Field(
        default=(0.75, 1.25), description="Range of per-axis semi-axis stretch"
    )
    lateral_offset: float = Field(
        default=0.2, gt=0, lt=0.5, description="Distance of each nucleus from the midline"
    )
    center_jitter: float = Field(
        default=0.015, ge=0, description="Standard deviation of the nucleus center jitter"
    )
    edge_sigma: float = Field(
        default=0.7, ge=0, description="Gaussian smoothing of tissue edges in voxels"
    )
    shading_amplitude: float = Field(
        default=1.5,
        ge=0,
        description="Peak additive low-frequency shading in units of each modality's gain",
    )
    shading_bumps: int = Field(default=4, ge=1, description="Gaussian bumps of the shading")
    class_size_factors: dict[DiagnosticClass, float] = Field(
        default_factory=lambda: {
            DiagnosticClass.HEALTHY: 1.0,
            DiagnosticClass.EARLY_PD: 0.92,
            DiagnosticClass.IRBD: 0.96,
        },
        description="Nucleus volume scale per diagnostic class",
    )

    @field_validator("nucleus_fraction", "nucleus_aspect")
    @classmethod
    def validate_range(cls, bounds: tuple[float, float]) -> tuple[float, float]:
        low, high = bounds
        if not 0 < low <= high:
            raise ValueError(f"Range must satisfy 0 < low <= high, got {bounds}")
        return bounds


class ModalityTransfer(BaseModel):
    """Monotone intensity map, bias field and noise of one modality."""

    model_config = ConfigDict(frozen=True)

    modality: Modality
    direction: Literal["increasing", "decreasing"]
    gain: float = Field(..., gt=0, description="Nucleus to background contrast")
    gamma: float = Field(default=1.0, gt=0, description="Power applied to the tissue level")
    offset: float = Field(default=0.0, ge=0)
    bias_amplitude: float = Field(default=0.1, ge=0, lt=0.5)
    bias_bumps: int = Field(default=4, ge=1, description="Gaussian bumps before band limiting")
    snr_range: tuple[float, float] = Field(
        default=(12.0, 20.0), description="Contrast over noise standard deviation"
    )

    @field_validator("snr_range")
    @classmethod
    def validate_snr_range(cls, bounds: tuple[float, float]) -> tuple[float, float]:
        low, high = bounds
        if not 0 < low <= high:
            raise ValueError(f"SNR range must satisfy 0 < low <= high, got {bounds}")
        return bounds

    def intensity(self, tissue: np.ndarray) -> np.ndarray:
        """Apply the monotone map to tissue levels in [0, 1]."""
        level = tissue**self.gamma
        if self.direction == "decreasing":
            level = 1 - level
        return self.offset + self.gain * level


def default_transfers() -> list[ModalityTransfer]:
    # QSM and R2* share a contrast; iMag and SWI are inverted against each other.
    return [
        ModalityTransfer(modality=Modality.IMAG, direction="decreasing", gain=0.9, offset=0.1),
        ModalityTransfer(modality=Modality.QSM, direction="increasing", gain=1.0),
        ModalityTransfer(
            modality=Modality.R2S,
            direction="increasing",
            gain=0.8,
            gamma=1.4,
            offset=0.3,
            bias_amplitude=0.12,
            snr_range=(10.0, 18.0),
        ),
        ModalityTransfer(
            modality=Modality.SWI,
            direction="increasing",
            gain=0.7,
            gamma=0.8,
            offset=0.2,
            bias_amplitude=0.12,
            snr_range=(8.0, 14.0),
        ),
    ]


class PhantomSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    shape: tuple[int, ...] = Field(default=settings.phantom.default_shape)
    spacing: tuple[float, ...] | None = Field(default=None, description="Defaults to 1.0 per axis")
    seed: int = Field(default=0, ge=0, description="Base seed of the cohort")
    anatomy: AnatomyParams = Field(default_factory=AnatomyParams)
    transfers: list[ModalityTransfer] = Field(default_factory=default_transfers)
    bias_theta: float = Field(
        default=settings.disentangle.theta,
        gt=0,
        lt=1,
        description="Bias fields are confined to the low band of this separation ratio",
    )

    @field_validator("shape")
    @classmethod
    def validate_shape(cls, shape: tuple[int, ...]) -> tuple[int, ...]:
        if len(shape) not in (2, 3) or any(size < 16 for size in shape):
            raise ValueError(f"Phantoms are 2D or 3D with sizes of at least 16, got {shape}")
        return shape

    @model_validator(mode="after")
    def validate_transfers(self) -> "PhantomSpec":
        modalities = [transfer.modality for transfer in self.transfers]
        if len(set(modalities)) != len(modalities):
            raise ValueError(f"Duplicate modality transfers: {modalities}")
        if self.spacing is not None and len(self.spacing) != len(self.shape):
            raise ValueError("Spacing must have one entry per axis")
        return self

    def transfer(self, modality: Modality) -> ModalityTransfer:
        for transfer in self.transfers:
            if transfer.modality == modality:
                return transfer
        raise KeyError(modality)


class PhantomSubject(BaseModel):
    """One generated subject; every modality shares ``mask``."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    subject_id: str = Field(..., min_length=1)
    diagnostic_class: DiagnosticClass
    seed: int
    attempts: int = Field(..., ge=1, description="Geometry sub-seeds tried")
    volumes: dict[Modality, Volume]
    mask: Mask
    brain_mask: Mask
    bias_fields: dict[Modality, Volume]
    shading: Volume = Field(..., description="Shared additive shading, band limited, peak 1")
    snr: dict[Modality, float]

    @model_validator(mode="after")
    def validate_shared_anatomy(self) -> "PhantomSubject":
        for modality, volume in self.volumes.items():
            if volume.shape != self.mask.shape:
                raise ValueError(f"{modality} volume shape differs from the mask")
        if self.shading.shape != self.mask.shape:
            raise ValueError("Shading shape differs from the mask")
        if self.mask.is_empty:
            raise ValueError("Phantom mask is empty")
        return self


class SubjectEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    subject_id: str = Field(..., min_length=1)
    split: SplitName
    diagnostic_class: DiagnosticClass
    seed: int
    volumes: dict[Modality, str] = Field(..., description="RVOL paths relative to the manifest")
    mask: str
    snr: dict[Modality, float] = Field(default_factory=dict)


class CohortManifest(BaseModel):
    model_config = ConfigDict(frozen=True)

    spec: PhantomSpec
    split_ratios: tuple[float, float, float]
    subjects: list[SubjectEntry]

    @model_validator(mode="after")
    def validate_unique_subjects(self) -> "CohortManifest":
        ids = [entry.subject_id for entry in self.subjects]
        if len(set(ids)) != len(ids):
            raise ValueError("A subject appears more than once in the manifest")
        return self

    def split(self, name: SplitName) -> list[SubjectEntry]:
        return [entry for entry in self.subjects if entry.split == name]

    @property
    def modalities(self) -> list[Modality]:
        return [transfer.modality for transfer in self.spec.transfers]


class LoadedSubject(BaseModel):
    """A manifest subject read back from disk."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    subject_id: str
    split: SplitName
    diagnostic_class: DiagnosticClass
    volumes: dict[Modality, Volume]
    mask: Mask
