"""Data Transfer Objects (DTOs) for the high/low frequency split."""

import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.config.config import settings
from src.disentangle.errors import ThetaTooSmallError
from src.volume.volume import Spectrum


def _round_half_up(value: float) -> int:
    return math.floor(value + 0.5)


class SplitConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    theta: float = Field(
        default=settings.disentangle.theta,
        gt=0,
        lt=1,
        description="Relative size of the centered low-frequency block",
    )

    def axis_bounds(self, size: int) -> tuple[int, int]:
        """Half-open [start, end) of the centered block on one axis."""
        start = _round_half_up(size * (1 - self.theta) / 2)
        end = _round_half_up(size * (1 + self.theta) / 2)
        return start, end

    def crop_bounds(self, shape: tuple[int, ...]) -> tuple[tuple[int, int], ...]:
        bounds = tuple(self.axis_bounds(size) for size in shape)
        if any(end - start < 1 for start, end in bounds):
            raise ThetaTooSmallError(shape=tuple(shape), theta=self.theta)
        return bounds

    def crop_shape(self, shape: tuple[int, ...]) -> tuple[int, ...]:
        return tuple(end - start for start, end in self.crop_bounds(shape))

    def crop_slices(self, shape: tuple[int, ...]) -> tuple[slice, ...]:
        return tuple(slice(start, end) for start, end in self.crop_bounds(shape))


class FrequencySplit(BaseModel):
    """Low-frequency center block and the high-frequency remainder of one spectrum."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    low_block: np.ndarray = Field(..., description="Complex centered block, crop shape")
    high_spectrum: Spectrum = Field(
        ..., description="Full spectrum with the crop region zeroed"
    )
    config: SplitConfig
    source_shape: tuple[int, ...]
    source_spacing: tuple[float, ...]

    @model_validator(mode="after")
    def validate_block_matches_crop(self) -> "FrequencySplit":
        expected = self.config.crop_shape(self.source_shape)
        if tuple(self.low_block.shape) != expected:
            raise ValueError(
                f"Low block shape {self.low_block.shape} does not match crop {expected}"
            )
        if self.high_spectrum.shape != self.source_shape:
            raise ValueError(
                f"High spectrum shape {self.high_spectrum.shape} does not match "
                f"source {self.source_shape}"
            )
        return self

    @property
    def crop_bounds(self) -> tuple[tuple[int, int], ...]:
        return self.config.crop_bounds(self.source_shape)

    @property
    def crop_slices(self) -> tuple[slice, ...]:
        return self.config.crop_slices(self.source_shape)

    @property
    def crop_shape(self) -> tuple[int, ...]:
        return tuple(self.low_block.shape)

    @property
    def zero_frequency_index(self) -> tuple[int, ...]:
        """Position of the zero frequency inside the low block."""
        return tuple(
            size // 2 - start
            for size, (start, _) in zip(self.source_shape, self.crop_bounds, strict=True)
        )
