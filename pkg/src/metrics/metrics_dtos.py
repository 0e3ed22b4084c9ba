"""Data Transfer Objects (DTOs) for per-subject metrics and their cohort summaries."""

from pydantic import BaseModel, ConfigDict, Field, model_validator

METRIC_NAMES: tuple[str, ...] = (
    "dice",
    "hd95",
    "precision",
    "recall",
    "mver",
    "maver",
    "pearson_r",
)


class SubjectMetrics(BaseModel):
    """Metric values of one subject; ``None`` marks an undefined metric."""

    model_config = ConfigDict(frozen=True)

    subject_id: str = Field(..., min_length=1)
    dice: float | None = Field(default=None, ge=0, le=1)
    hd95: float | None = Field(default=None, ge=0, description="Voxels scaled by spacing")
    precision: float | None = Field(default=None, ge=0, le=1)
    recall: float | None = Field(default=None, ge=0, le=1)
    mver: float | None = Field(default=None, ge=-1, description="Signed (|P| - |G|) / |G|")
    maver: float | None = Field(default=None, ge=0)
    pearson_r: float | None = Field(default=None, ge=-1, le=1)

    def value(self, metric: str) -> float | None:
        return getattr(self, metric)

    @property
    def is_fully_undefined(self) -> bool:
        return all(self.value(metric) is None for metric in METRIC_NAMES)


class MetricSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    mean: float | None = Field(default=None, description="None when every subject is excluded")
    sem: float | None = Field(default=None, ge=0, description="Omitted when fewer than 2 values")
    n: int = Field(..., ge=0, description="Subjects contributing a value")
    excluded: int = Field(default=0, ge=0, description="Subjects with an undefined value")

    def format(self, digits: int = 2) -> str:
        if self.mean is None:
            return "n/a"
        if self.sem is None:
            return f"{self.mean:.{digits}f}"
        return f"{self.mean:.{digits}f}±{self.sem:.{digits}f}"


class MetricsReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    subjects: list[SubjectMetrics]
    summaries: dict[str, MetricSummary]

    @model_validator(mode="after")
    def validate_metric_names(self) -> "MetricsReport":
        if set(self.summaries) != set(METRIC_NAMES):
            raise ValueError(f"Summaries must cover exactly {METRIC_NAMES}")

        mver, maver = self.summaries["mver"].mean, self.summaries["maver"].mean
        if mver is not None and maver is not None and maver < abs(mver) - 1e-12:
            raise ValueError(f"MAVER {maver} is smaller than |MVER| {abs(mver)}")
        return self

    def summary(self, metric: str) -> MetricSummary:
        return self.summaries[metric]

    @property
    def all_undefined(self) -> bool:
        return all(summary.mean is None for summary in self.summaries.values())
