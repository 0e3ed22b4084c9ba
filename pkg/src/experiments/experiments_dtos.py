"""Data Transfer Objects (DTOs) for experiment plans, runs and result tables."""

from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.config.config import settings
from src.fusion.fusion_dtos import EpochRecord, FusionModelConfig
from src.metrics.metrics_dtos import METRIC_NAMES, MetricSummary, SubjectMetrics
from src.network.network_dtos import ArchitectureConfig, OptimizerConfig
from src.utils.modality import Modality, combo_label

ExperimentKind = Literal["combo", "fraction"]
ModelKind = Literal["baseline", "proposed"]

KEY_COLUMNS: tuple[str, ...] = (
    "experiment",
    "target",
    "model",
    "combo",
    "fraction",
    "n_train",
    "n_seeds",
    "n_test",
)
TABLE_COLUMNS: tuple[str, ...] = (
    *KEY_COLUMNS,
    *(f"{metric}_{stat}" for metric in METRIC_NAMES for stat in ("mean", "sem")),
    "best",
)


class ExperimentPlan(BaseModel):
    """JSON plan shared by both sweeps."""

    model_config = ConfigDict(frozen=True)

    manifest: Path = Field(..., description="Cohort manifest.json (or its directory)")
    target_modality: Modality
    combos: list[list[Modality]] | None = Field(
        default=None,
        description="Combo sweep rows (default: the target with every subset of the others)",
    )
    prior_combo: list[Modality] | None = Field(
        default=None, description="Fraction sweep priors (default: best combo or all modalities)"
    )
    best_combo_source: Path | None = Field(
        default=None, description="Combo sweep CSV to take the fraction sweep priors from"
    )
    fractions: list[float] = Field(default_factory=lambda: list(settings.experiments.fractions))
    combo_fraction: float = Field(default=settings.experiments.combo_fraction, gt=0, le=1)
    seeds: list[int] = Field(default_factory=lambda: [0], min_length=1)
    models: list[ModelKind] = Field(default_factory=lambda: ["baseline", "proposed"])
    epochs: int = Field(default=settings.experiments.default_epochs, ge=1)
    theta: float = Field(default=settings.disentangle.theta, gt=0, lt=1)
    arch: ArchitectureConfig = Field(default_factory=ArchitectureConfig)
    optimizer: OptimizerConfig = Field(default_factory=OptimizerConfig)
    prediction_threshold: float = Field(
        default=settings.experiments.prediction_threshold, gt=0, lt=1
    )
    workers: int | None = Field(default=None, ge=1, description="Parallel run processes")
    checkpoint_dir: Path | None = Field(default=None, description="Save each run's checkpoint")

    @field_validator("fractions")
    @classmethod
    def validate_fractions(cls, fractions: list[float]) -> list[float]:
        if not fractions:
            raise ValueError("At least one fraction is required")
        if any(not 0 < fraction <= 1 for fraction in fractions):
            raise ValueError(f"Fractions must lie in (0, 1], got {fractions}")
        return sorted(set(fractions))

    @field_validator("seeds")
    @classmethod
    def validate_seeds(cls, seeds: list[int]) -> list[int]:
        if any(seed < 0 for seed in seeds) or len(set(seeds)) != len(seeds):
            raise ValueError(f"Seeds must be unique and non-negative, got {seeds}")
        return seeds

    @model_validator(mode="after")
    def validate_combos(self) -> "ExperimentPlan":
        for combo in [*(self.combos or []), *([self.prior_combo] if self.prior_combo else [])]:
            if self.target_modality not in combo:
                raise ValueError(f"Combo {combo_label(combo)} does not contain the target")
            if len(set(combo)) != len(combo):
                raise ValueError(f"Combo {combo} repeats a modality")
        return self

    @property
    def fusion_config(self) -> FusionModelConfig:
        return FusionModelConfig(theta=self.theta, architecture=self.arch, optimizer=self.optimizer)


class RunSpec(BaseModel):
    """Identity of one training run."""

    model_config = ConfigDict(frozen=True)

    experiment: ExperimentKind
    model_kind: ModelKind
    target: Modality
    combo: list[Modality]
    fraction: float = Field(..., gt=0, le=1)
    seed: int = Field(..., ge=0)

    @property
    def combo_label(self) -> str:
        return combo_label(self.combo)

    @property
    def run_id(self) -> str:
        label = self.combo_label.replace("+", "_").replace("*", "s")
        return f"{self.experiment}-{self.model_kind}-{label}-f{self.fraction:.3f}-s{self.seed}"


class RunResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    run: RunSpec
    train_ids: list[str] = Field(..., min_length=1)
    donor_id: str | None = Field(default=None, description="Subject supplying the priors")
    test_metrics: list[SubjectMetrics]
    history: list[EpochRecord]
    best_epoch: int = Field(..., ge=1)


class ResultRow(BaseModel):
    """One configuration of a sweep: metrics as mean ± SEM across test subjects."""

    model_config = ConfigDict(frozen=True)

    experiment: ExperimentKind
    target: Modality
    model: ModelKind
    combo: str = Field(..., min_length=1, description="Display label, e.g. QSM+SWI")
    fraction: float = Field(..., gt=0, le=1)
    n_train: int = Field(..., ge=1)
    n_seeds: int = Field(..., ge=1)
    n_test: int = Field(..., ge=0)
    metrics: dict[str, MetricSummary]
    best: list[str] = Field(default_factory=list, description="Metrics where this row is best")

    @field_validator("metrics")
    @classmethod
    def validate_metric_names(cls, metrics: dict[str, MetricSummary]) -> dict[str, MetricSummary]:
        if set(metrics) != set(METRIC_NAMES):
            raise ValueError(f"Row metrics must cover exactly {METRIC_NAMES}")
        return metrics


class ResultTable(BaseModel):
    model_config = ConfigDict(frozen=True)

    experiment: ExperimentKind
    rows: list[ResultRow]
    runs: list[RunResult] = Field(default_factory=list)
