"""Data Transfer Objects (DTOs) for fusion samples, model configuration and runs."""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.config.config import settings
from src.disentangle.disentangle_dtos import SplitConfig
from src.network.checkpoint import Checkpoint
from src.network.network_dtos import ArchitectureConfig, OptimizerConfig
from src.utils.modality import Modality
from src.volume.volume import Mask, Volume


class LowPrior(BaseModel):
    """Crop-sized low-frequency image of one modality."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    modality: Modality
    donor_id: str = Field(..., min_length=1, description="Subject the image came from")
    image: Volume


class ModalitySample(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    subject_id: str = Field(..., min_length=1)
    target_id: Modality = Field(..., description="Modality being segmented")
    target_volume: Volume = Field(..., description="Min-max normalized target image")
    high_volume: Volume = Field(..., description="High-frequency part of the target")
    mask: Mask
    low_priors: list[LowPrior] = Field(..., min_length=1, description="Target low part first")
    theta: float = Field(default=settings.disentangle.theta, gt=0, lt=1)

    @model_validator(mode="after")
    def validate_shapes(self) -> "ModalitySample":
        if self.mask.shape != self.target_volume.shape:
            raise ValueError(
                f"Mask shape {self.mask.shape} differs from target {self.target_volume.shape}"
            )
        if self.high_volume.shape != self.target_volume.shape:
            raise ValueError("High-frequency image must have the target shape")

        crop_shape = SplitConfig(theta=self.theta).crop_shape(self.target_volume.shape)
        for prior in self.low_priors:
            if prior.image.shape != crop_shape:
                raise ValueError(
                    f"Prior {prior.modality} has shape {prior.image.shape}, "
                    f"expected crop shape {crop_shape}"
                )

        if self.low_priors[0].modality != self.target_id:
            raise ValueError("The first low prior must be the target's own low part")
        return self

    @property
    def prior_count(self) -> int:
        return len(self.low_priors)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.target_volume.shape


class FusionModelConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    theta: float = Field(default=settings.disentangle.theta, gt=0, lt=1)
    architecture: ArchitectureConfig = Field(default_factory=ArchitectureConfig)
    optimizer: OptimizerConfig = Field(default_factory=OptimizerConfig)

    @property
    def split_config(self) -> SplitConfig:
        return SplitConfig(theta=self.theta)


class RunConfig(BaseModel):
    """JSON run configuration of a single training run."""

    model_config = ConfigDict(frozen=True)

    target_modality: Modality
    prior_combo: list[Modality] = Field(default_factory=list)
    model_kind: Literal["proposed", "baseline"] = "proposed"
    theta: float = Field(default=settings.disentangle.theta, gt=0, lt=1)
    train_fraction: float = Field(default=1.0, gt=0, le=1)
    seed: int = Field(default=0, ge=0)
    epochs: int = Field(default=settings.experiments.default_epochs, ge=1)
    arch: ArchitectureConfig = Field(default_factory=ArchitectureConfig)
    optimizer: OptimizerConfig = Field(default_factory=OptimizerConfig)

    @field_validator("prior_combo")
    @classmethod
    def validate_unique_modalities(cls, combo: list[Modality]) -> list[Modality]:
        if len(set(combo)) != len(combo):
            raise ValueError(f"Prior combo contains duplicates: {combo}")
        return combo

    @property
    def fusion_config(self) -> FusionModelConfig:
        return FusionModelConfig(
            theta=self.theta, architecture=self.arch, optimizer=self.optimizer
        )


class EpochRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    epoch: int = Field(..., ge=1)
    train_loss: float
    train_dice: float
    val_dice: float | None = None


class TrainingResult(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    checkpoint: Checkpoint = Field(..., description="Parameters with the best validation Dice")
    history: list[EpochRecord]
    best_epoch: int = Field(..., ge=1)
    best_score: float = Field(..., description="Validation Dice (training Dice without a validation set)")
