"""Data Transfer Objects (DTOs) for architectures, gradient checks and checkpoints."""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

from src.config.config import settings


class ArchitectureConfig(BaseModel):
    """Backbone and head hyperparameters; fully determines the parameter count."""

    model_config = ConfigDict(frozen=True)

    dim: Literal[2, 3] = Field(default=2, description="Spatial dimensionality")
    in_channels: int = Field(default=1, ge=1, description="Input channels")
    base_channels: int = Field(
        default=settings.network.base_channels, ge=1, description="First-level width"
    )
    depth: int = Field(default=settings.network.depth, ge=1, le=5, description="Levels")
    negative_slope: float = Field(
        default=settings.network.negative_slope, ge=0, lt=1, description="Leaky-ReLU slope"
    )
    dropout: float = Field(
        default=settings.network.dropout, ge=0, lt=1, description="Head dropout rate"
    )
    head_channels: int = Field(
        default=settings.network.base_channels,
        ge=1,
        description="Hidden channels of the prediction head",
    )

    @property
    def spatial_divisor(self) -> int:
        """Input sizes must be multiples of this for the pooling path."""
        return 2 ** (self.depth - 1)


class OptimizerConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    learning_rate: float = Field(default=settings.network.learning_rate, gt=0)
    beta1: float = Field(default=settings.network.beta1, ge=0, lt=1)
    beta2: float = Field(default=settings.network.beta2, ge=0, lt=1)
    eps: float = Field(default=settings.network.adam_eps, gt=0)


class ParameterGradCheck(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    relative_error: float = Field(..., ge=0)
    analytic_norm: float = Field(..., ge=0)
    entries_checked: int = Field(..., ge=0)


class GradCheckReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    parameters: list[ParameterGradCheck]
    max_relative_error: float = Field(..., ge=0)
    tolerance: float = Field(..., gt=0)

    @property
    def passed(self) -> bool:
        return self.max_relative_error <= self.tolerance


class CheckpointHeader(BaseModel):
    """JSON descriptor stored next to the raw float32 parameter blob."""

    model_config = ConfigDict(frozen=True)

    model_kind: Literal["proposed", "baseline"]
    architecture: ArchitectureConfig
    theta: float | None = Field(default=None, gt=0, lt=1)
    seed: int
    step: int = Field(..., ge=0)
    parameter_names: list[str]
    parameter_shapes: list[list[int]]
    byte_order: Literal["little"] = "little"
    dtype: Literal["f32"] = "f32"
