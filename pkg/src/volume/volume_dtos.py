"""Data Transfer Objects (DTOs) for volume files and transform results."""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.volume.volume import Volume

RVOL_DTYPES: dict[str, str] = {"f32": "<f4", "u8": "u1"}


class InverseTransform(BaseModel):
    """Real part of an inverse transform plus what was discarded."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    volume: Volume = Field(..., description="Real part of the inverse transform")
    imaginary_residual: float = Field(
        ..., ge=0, description="Maximum absolute imaginary part that was dropped"
    )


class RvolHeader(BaseModel):
    """JSON sidecar of an RVOL file; the payload is raw little-endian data."""

    model_config = ConfigDict(frozen=True)

    shape: list[int] = Field(..., min_length=2, max_length=3, description="Grid shape")
    dtype: Literal["f32", "u8"] = Field(..., description="Payload scalar type")
    spacing: list[float] = Field(..., description="Voxel size per axis")
    order: Literal["row-major"] = Field(default="row-major", description="Payload order")

    @field_validator("shape")
    @classmethod
    def validate_shape_positive(cls, shape: list[int]) -> list[int]:
        if any(axis <= 0 for axis in shape):
            raise ValueError(f"Shape entries must be positive. Got: {shape}")
        return shape

    @model_validator(mode="after")
    def validate_spacing_matches_shape(self) -> "RvolHeader":
        if len(self.spacing) != len(self.shape):
            raise ValueError(
                f"Spacing has {len(self.spacing)} entries for a {len(self.shape)}D shape"
            )
        if any(axis <= 0 for axis in self.spacing):
            raise ValueError(f"Spacing entries must be positive. Got: {self.spacing}")
        return self

    @property
    def numpy_dtype(self) -> str:
        return RVOL_DTYPES[self.dtype]

    @property
    def element_count(self) -> int:
        count = 1
        for axis in self.shape:
            count *= axis
        return count
