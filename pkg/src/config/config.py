"""Application configuration settings.

This module contains only settings that are used across multiple modules.
Settings specific to a single class are constructor keyword arguments that fall
back to the values defined here.
"""

from pydantic import BaseModel, ConfigDict, Field


class FourierSettings(BaseModel):
    """Logging threshold of the inverse transform."""

    model_config = ConfigDict(frozen=True)

    imaginary_residual_warning: float = Field(
        default=1e-6,
        ge=0,
        description="Relative imaginary residual above which an inversion is logged",
    )


class DisentangleSettings(BaseModel):
    model_config = ConfigDict(frozen=True)

    theta: float = Field(
        default=0.1, gt=0, lt=1, description="Default high/low frequency separation ratio"
    )


class NetworkSettings(BaseModel):
    """Desk-scale architecture and optimizer defaults.

    These settings are used by the network, fusion and experiments modules.
    """

    model_config = ConfigDict(frozen=True)

    depth: int = Field(default=3, ge=1, le=5, description="Number of UNet levels")
    base_channels: int = Field(
        default=8, ge=1, le=64, description="Channels of the first UNet level"
    )
    negative_slope: float = Field(
        default=0.01, ge=0, lt=1, description="Leaky-ReLU negative slope"
    )
    dropout: float = Field(
        default=0.1, ge=0, lt=1, description="Dropout rate of the post-fusion head"
    )
    learning_rate: float = Field(default=1e-3, gt=0, description="Adam learning rate")
    beta1: float = Field(default=0.9, ge=0, lt=1, description="Adam first moment decay")
    beta2: float = Field(default=0.999, ge=0, lt=1, description="Adam second moment decay")
    adam_eps: float = Field(default=1e-8, gt=0, description="Adam denominator epsilon")
    dice_smoothing: float = Field(
        default=1.0, ge=0, description="Soft-Dice smoothing constant"
    )
    gradcheck_step: float = Field(
        default=1e-5, gt=0, description="Central difference perturbation"
    )
    gradcheck_tolerance: float = Field(
        default=1e-4, gt=0, description="Maximum accepted relative gradient error"
    )


class PhantomSettings(BaseModel):
    model_config = ConfigDict(frozen=True)

    default_shape: tuple[int, ...] = Field(
        default=(64, 64), description="Default phantom grid (2D for speed)"
    )
    max_geometry_attempts: int = Field(
        default=10, ge=1, description="Sub-seeds tried before a geometry is rejected"
    )
    min_mask_fraction: float = Field(
        default=0.005, gt=0, lt=1, description="Lowest accepted nucleus voxel fraction"
    )
    max_mask_fraction: float = Field(
        default=0.03, gt=0, lt=1, description="Highest accepted nucleus voxel fraction"
    )
    diagnostic_class_weights: dict[str, int] = Field(
        default_factory=lambda: {"healthy": 18, "early_pd": 46, "irbd": 16},
        description="Relative frequency of each synthetic diagnostic class",
    )


class MetricsSettings(BaseModel):
    model_config = ConfigDict(frozen=True)

    hd_percentile: float = Field(
        default=95.0, gt=0, le=100, description="Percentile of pooled surface distances"
    )


class ExperimentSettings(BaseModel):
    """Shared settings for the sweeps and the command line."""

    model_config = ConfigDict(frozen=True)

    fractions: tuple[float, ...] = Field(
        default=(0.075, 0.15, 0.30, 0.50, 1.0),
        description="Training-set fractions of the fraction sweep",
    )
    split_ratios: tuple[float, float, float] = Field(
        default=(51 / 80, 13 / 80, 16 / 80),
        description="Train / validation / test ratios of a generated cohort",
    )
    combo_fraction: float = Field(
        default=0.075, gt=0, le=1, description="Training fraction used by the combo sweep"
    )
    prediction_threshold: float = Field(
        default=0.5, gt=0, lt=1, description="Threshold applied to the mean head output"
    )
    default_epochs: int = Field(default=100, ge=1, description="Default training epochs")


class Settings(BaseModel):
    """Application configuration organized by module context."""

    model_config = ConfigDict(frozen=True)

    fourier: FourierSettings = Field(default_factory=FourierSettings)
    disentangle: DisentangleSettings = Field(default_factory=DisentangleSettings)
    network: NetworkSettings = Field(default_factory=NetworkSettings)
    phantom: PhantomSettings = Field(default_factory=PhantomSettings)
    metrics: MetricsSettings = Field(default_factory=MetricsSettings)
    experiments: ExperimentSettings = Field(default_factory=ExperimentSettings)


settings = Settings()
