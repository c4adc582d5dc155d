"""Custom exceptions for Forest-PLS."""

from collections.abc import Generator
from contextlib import contextmanager
from typing import Any


class ForestPlsError(Exception):
    """Base exception for all Forest-PLS errors."""

    exit_code: int = 1

    def __init__(self, message: str, *, stage: str | None = None) -> None:
        super().__init__(message)
        self.stage = stage

    def __str__(self) -> str:
        message = super().__str__()
        return f"[{self.stage}] {message}" if self.stage else message


class ConfigurationError(ForestPlsError):
    """Raised when configuration is invalid."""

    exit_code = 2


# Data errors (exit code 3)
class DataError(ForestPlsError):
    """Raised when input data cannot be used."""

    exit_code = 3


class SchemaError(DataError):
    """Raised when a column named by the ingestion schema is missing."""

    pass


class ParseError(DataError):
    """Raised when a cell cannot be parsed as a finite number."""

    def __init__(self, message: str, *, row: int, column: str) -> None:
        super().__init__(f"{message} (row {row}, column '{column}')")
        self.row = row
        self.column = column


class EmptyDataError(DataError):
    """Raised when no rows remain after filtering."""

    pass


class DegenerateColumnError(DataError):
    """Raised when a zero-variance column must be scaled."""

    def __init__(self, column: str) -> None:
        super().__init__(f"Column '{column}' has zero variance and cannot be scaled")
        self.column = column


class InsufficientDataError(DataError):
    """Raised when a sample is too small for the requested operation."""

    pass


class SplitInfeasibleError(DataError):
    """Raised when an honest split cannot place both arms on both sides."""

    pass


class ShapeError(DataError):
    """Raised when array shapes do not match a fitted model."""

    pass


# Estimation errors (exit code 4)
class EstimationError(ForestPlsError):
    """Raised when an estimator fails."""

    exit_code = 4


class ResidualExhaustedError(EstimationError):
    """Signals that deflated residuals carry no covariance with the outcome."""

    pass


class RankDeficiencyError(EstimationError):
    """Raised when the Krylov inner matrix is numerically singular."""

    pass


class SingularMatrixError(EstimationError):
    """Raised when a least-squares design is rank deficient beyond jitter."""

    pass


class ArmEmptyError(EstimationError):
    """Raised when a leaf has no treated or no control observations."""

    pass


class TreeDegenerateError(EstimationError):
    """Raised when a causal tree cannot satisfy the minimum arm size."""

    pass


class ConvergenceError(EstimationError):
    """Raised when an iterative solver exhausts its iteration budget."""

    def __init__(self, message: str, *, diagnostics: dict[str, Any] | None = None) -> None:
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class PointMassError(EstimationError):
    """Raised when a density is requested for a zero-variance sample."""

    pass


class ReplicationError(EstimationError):
    """Raised when a simulation replication fails."""

    def __init__(self, message: str, *, seed: int, replication: int) -> None:
        super().__init__(f"{message} (replication {replication}, seed {seed})")
        self.seed = seed
        self.replication = replication


@contextmanager
def pipeline_stage(name: str) -> Generator[None, None, None]:
    """Tag any Forest-PLS error raised inside the block with a stage label."""
    try:
        yield
    except ForestPlsError as e:
        if e.stage is None:
            e.stage = name
        raise
