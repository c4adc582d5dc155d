from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.config import settings as app_settings


# Ingestion
class IngestionSchema(BaseModel):
    """Column-role mapping for CSV ingestion."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    outcome: str = Field(..., min_length=1)
    policy: str = Field(..., min_length=1)
    features: list[str] | Literal["rest"] = "rest"
    filter: list[str] = Field(default_factory=list, description="column=value conditions")
    treated_value: float | None = Field(
        None, description="Policy column value marking treatment; None means the column is 0/1"
    )
    outcome_transform: Literal["none", "log_floor1"] = "none"
    delimiter: str | None = Field(None, description="None for comma; '\\s+' for whitespace")

    @field_validator("features")
    @classmethod
    def validate_features(cls, v: list[str] | str) -> list[str] | str:
        if isinstance(v, list) and not v:
            raise ValueError("features must name at least one column or be 'rest'")
        return v

    @field_validator("filter")
    @classmethod
    def validate_filter(cls, v: list[str]) -> list[str]:
        for condition in v:
            column, sep, value = condition.partition("=")
            if not sep or not column.strip() or not value.strip():
                raise ValueError(f"filter entries must look like column=value, got '{condition}'")
        return v

    def parsed_filter(self) -> dict[str, list[float]]:
        """Group filter conditions by column (values OR-ed, columns AND-ed)."""
        grouped: dict[str, list[float]] = {}
        for condition in self.filter:
            column, _, value = condition.partition("=")
            grouped.setdefault(column.strip(), []).append(float(value))
        return grouped


# Run configuration
DesignName = Literal["rct", "iv", "noconf", "nbd", "constant"]
EstimatorName = Literal["forest-pls", "causal-forest"]


class RunConfig(BaseModel):
    """Parameters of one CLI command run."""

    model_config = ConfigDict(extra="forbid")

    command: Literal["simulate", "analyze", "compare"]

    # Data
    design: DesignName = "rct"
    n: int = Field(500, ge=20, le=1_000_000)
    reps: int = Field(50, ge=1, le=10_000)
    seed: int = Field(default_factory=lambda: app_settings.settings.default_seed, ge=0)
    data: Path | None = None
    schema_path: Path | None = None
    preset: Literal["penn"] | None = None
    scale: bool | None = Field(None, description="None = preset default (Penn scales)")
    evaluation: Literal["estimation", "fresh"] = "estimation"

    # Estimator
    estimator: EstimatorName = "forest-pls"
    components: int = Field(0, ge=0, le=1000, description="0 = choose by five-fold CV")
    max_components: int = Field(6, ge=1, le=1000)
    trees: int = Field(1000, ge=1, le=100_000)
    beta: float = Field(0.8, gt=0.0, lt=1.0)
    alpha: float = Field(0.2, gt=0.0, le=0.5)
    k: int = Field(10, ge=1)
    pi: float = Field(0.8, gt=0.0, le=1.0)
    min_arm: int = Field(3, ge=1)
    honest_fraction: float = Field(0.5, gt=0.0, lt=1.0)
    ci_level: float = Field(0.95, gt=0.0, lt=1.0)
    threads: int | None = Field(None, ge=1)
    save_forest: bool = False

    # Baselines
    lasso_lambda: float = Field(2.605, ge=0.0)

    # Output
    out: Path = Field(default_factory=lambda: Path(app_settings.settings.output_dir))

    @model_validator(mode="after")
    def validate_sources(self) -> "RunConfig":
        if self.command == "analyze" and self.data is None:
            raise ValueError("analyze requires --data")
        if self.command == "analyze" and self.preset is None and self.schema_path is None:
            raise ValueError("analyze requires --preset penn or --schema FILE")
        if self.components and self.components > self.max_components:
            self.max_components = self.components
        return self


# Simulation output
class MomentRow(BaseModel):
    """Per-replication moments of true and estimated effects."""

    replication: int
    seed: int
    components: int | None
    mean_true: float
    var_true: float
    mean_est: float
    var_est: float
    l1_distance: float | None


class ReplicationSummaryPayload(BaseModel):
    """Plot-ready simulation summary (summary.json)."""

    design: DesignName
    n: int
    estimator: str
    replications: int
    binarized_policy: bool
    grid: list[float]
    density_true: list[float]
    density_est: list[float]
    density_diff: list[float]
    moments: list[MomentRow]


# Forest artifact
class TreeArtifact(BaseModel):
    """Flat-array encoding of one honest causal tree."""

    seed: list[int]
    feature: list[int]
    threshold: list[float]
    left: list[int]
    right: list[int]
    treated_mean: list[float]
    control_mean: list[float]
    n_treated: list[int]
    n_control: list[int]
    n_train: list[int]
    train_indices: list[int]
    estimation_indices: list[int]


class ForestArtifact(BaseModel):
    """Versioned JSON artifact for a fitted causal forest."""

    format_version: Literal[1] = 1
    n_obs: int
    n_features: int
    subsample_size: int
    master_seed: int
    config: dict[str, float | int | None]
    subsamples: list[list[int]]
    trees: list[TreeArtifact]
