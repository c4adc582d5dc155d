"""
Immutable tabular data for policy-effect estimation.

A Dataset bundles the outcome vector, the feature matrix, the binary policy
indicator and the feature names. Arrays are copied and frozen at construction
so a Dataset (and everything derived from it) can be shared across threads.
"""

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from loguru import logger

from src.utils.exceptions import (
    DataError,
    DegenerateColumnError,
    InsufficientDataError,
    ShapeError,
    SplitInfeasibleError,
)

MEAN_TOLERANCE = 1e-10


def _frozen(values: np.ndarray) -> np.ndarray:
    array = np.array(values, dtype=np.float64, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class Dataset:
    """Outcome, features and binary policy for n units."""

    features: np.ndarray
    outcome: np.ndarray
    policy: np.ndarray
    feature_names: tuple[str, ...]
    dropped_features: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        features = np.asarray(self.features, dtype=np.float64)
        if features.ndim == 1:
            features = features.reshape(-1, 1)
        if features.ndim != 2:
            raise ShapeError(f"features must be a 2-D matrix, got {features.ndim} dimensions")

        outcome = np.asarray(self.outcome, dtype=np.float64).ravel()
        policy = np.asarray(self.policy, dtype=np.float64).ravel()
        n, p = features.shape

        if n < 2:
            raise InsufficientDataError(f"Dataset needs at least 2 rows, got {n}")
        if p < 1:
            raise ShapeError("Dataset needs at least one feature column")
        if outcome.shape[0] != n or policy.shape[0] != n:
            raise ShapeError(
                f"Column lengths differ: features {n}, outcome {outcome.shape[0]}, "
                f"policy {policy.shape[0]}"
            )
        if len(self.feature_names) != p:
            raise ShapeError(f"Expected {p} feature names, got {len(self.feature_names)}")
        if not np.isin(policy, (0.0, 1.0)).all():
            raise DataError("Policy values must be exactly 0 or 1")
        for name, values in (("features", features), ("outcome", outcome)):
            if not np.isfinite(values).all():
                raise DataError(f"Non-finite values in {name}")

        object.__setattr__(self, "features", _frozen(features))
        object.__setattr__(self, "outcome", _frozen(outcome))
        object.__setattr__(self, "policy", _frozen(policy))
        object.__setattr__(self, "feature_names", tuple(str(f) for f in self.feature_names))
        object.__setattr__(self, "dropped_features", tuple(self.dropped_features))

    @property
    def n(self) -> int:
        return int(self.features.shape[0])

    @property
    def p(self) -> int:
        return int(self.features.shape[1])

    @property
    def n_treated(self) -> int:
        return int(self.policy.sum())

    @property
    def n_control(self) -> int:
        return self.n - self.n_treated

    def subset(self, indices: Sequence[int] | np.ndarray) -> "Dataset":
        """Return the rows at the given indices as a new Dataset."""
        idx = np.asarray(indices, dtype=np.intp)
        return Dataset(
            features=self.features[idx],
            outcome=self.outcome[idx],
            policy=self.policy[idx],
            feature_names=self.feature_names,
            dropped_features=self.dropped_features,
        )

    def with_outcome(self, outcome: np.ndarray) -> "Dataset":
        """Return a copy with the outcome vector replaced."""
        return Dataset(
            features=self.features,
            outcome=outcome,
            policy=self.policy,
            feature_names=self.feature_names,
            dropped_features=self.dropped_features,
        )


@dataclass(frozen=True)
class CenteringStats:
    """Column means and scales removed by center()."""

    feature_means: np.ndarray
    outcome_mean: float
    feature_scales: np.ndarray
    scaled: bool = False

    def __post_init__(self) -> None:
        if np.any(self.feature_scales <= 0):
            raise DataError("Centering scales must be strictly positive")
        object.__setattr__(self, "feature_means", _frozen(self.feature_means))
        object.__setattr__(self, "feature_scales", _frozen(self.feature_scales))

    @classmethod
    def identity(cls, p: int) -> "CenteringStats":
        """Statistics that leave already-centered data unchanged."""
        return cls(feature_means=np.zeros(p), outcome_mean=0.0, feature_scales=np.ones(p))

    def transform(self, features: np.ndarray) -> np.ndarray:
        """Center (and scale) a raw feature matrix with the stored statistics."""
        X = np.atleast_2d(np.asarray(features, dtype=np.float64))
        if X.shape[1] != self.feature_means.shape[0]:
            raise ShapeError(
                f"Expected {self.feature_means.shape[0]} feature columns, got {X.shape[1]}"
            )
        return (X - self.feature_means) / self.feature_scales


@dataclass(frozen=True)
class HonestSplit:
    """Disjoint training and estimation index sets."""

    train_indices: np.ndarray
    estimation_indices: np.ndarray

    def __post_init__(self) -> None:
        train = np.sort(np.asarray(self.train_indices, dtype=np.intp))
        est = np.sort(np.asarray(self.estimation_indices, dtype=np.intp))
        if np.intersect1d(train, est).size:
            raise DataError("Honest split halves overlap")
        train.setflags(write=False)
        est.setflags(write=False)
        object.__setattr__(self, "train_indices", train)
        object.__setattr__(self, "estimation_indices", est)

    @property
    def size(self) -> int:
        return int(self.train_indices.size + self.estimation_indices.size)


def center(dataset: Dataset, scale: bool = False) -> tuple[Dataset, CenteringStats]:
    """
    Center features and outcome; optionally scale features to unit variance.

    Args:
        dataset: Input data (n >= 2)
        scale: Divide each feature by its sample standard deviation (ddof=1)

    Returns:
        Tuple of (centered dataset, statistics needed to undo the transform)

    Raises:
        DegenerateColumnError: If scale is set and a column has zero variance
    """
    X = dataset.features
    means = X.mean(axis=0)
    outcome_mean = float(dataset.outcome.mean())

    if scale:
        scales = X.std(axis=0, ddof=1)
        for j, s in enumerate(scales):
            if not s > 0:
                raise DegenerateColumnError(dataset.feature_names[j])
    else:
        scales = np.ones(dataset.p)

    centered_X = (X - means) / scales
    centered_y = dataset.outcome - outcome_mean
    # Second pass removes the rounding residue of the first subtraction.
    centered_X = centered_X - centered_X.mean(axis=0)
    centered_y = centered_y - centered_y.mean()

    stats = CenteringStats(
        feature_means=means, outcome_mean=outcome_mean, feature_scales=scales, scaled=scale
    )
    centered = Dataset(
        features=centered_X,
        outcome=centered_y,
        policy=dataset.policy,
        feature_names=dataset.feature_names,
        dropped_features=dataset.dropped_features,
    )
    return centered, stats


def uncenter(dataset: Dataset, stats: CenteringStats) -> Dataset:
    """Undo center(): rescale features and add the stored means back."""
    return Dataset(
        features=dataset.features * stats.feature_scales + stats.feature_means,
        outcome=dataset.outcome + stats.outcome_mean,
        policy=dataset.policy,
        feature_names=dataset.feature_names,
        dropped_features=dataset.dropped_features,
    )


def is_centered(dataset: Dataset, tol: float = 1e-8) -> bool:
    """Check that every feature column and the outcome have (near) zero mean."""
    col_scale = np.maximum(np.abs(dataset.features).max(axis=0), 1.0)
    y_scale = max(float(np.abs(dataset.outcome).max()), 1.0)
    return bool(
        np.all(np.abs(dataset.features.mean(axis=0)) <= tol * col_scale)
        and abs(dataset.outcome.mean()) <= tol * y_scale
    )


def split_indices(
    policy: np.ndarray,
    seed: int | Sequence[int] | np.random.Generator,
    fraction: float = 0.5,
    max_retries: int = 100,
) -> HonestSplit:
    """
    Randomly partition positions 0..n-1 into training and estimation halves.

    Both halves must contain at least one treated and one control unit; the
    permutation is redrawn up to max_retries times.

    Args:
        policy: Binary policy vector (length n)
        seed: Integer seed, seed tuple or an existing generator
        fraction: Share of units assigned to the training half
        max_retries: Number of permutations tried before giving up

    Returns:
        HonestSplit with sorted index arrays

    Raises:
        InsufficientDataError: If n < 4
        SplitInfeasibleError: If one arm is absent or no draw satisfies the arm constraint
    """
    policy = np.asarray(policy)
    n = policy.shape[0]
    if n < 4:
        raise InsufficientDataError(f"Honest splitting needs at least 4 units, got {n}")
    if not 0.0 < fraction < 1.0:
        raise DataError(f"Honest fraction must lie in (0, 1), got {fraction}")

    n_treated = int(policy.sum())
    if n_treated < 2 or n - n_treated < 2:
        raise SplitInfeasibleError(
            f"Both arms need two units to appear on both sides (treated={n_treated}, "
            f"control={n - n_treated})"
        )

    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    n_train = min(max(int(round(n * fraction)), 2), n - 2)

    for attempt in range(max_retries):
        perm = rng.permutation(n)
        train, est = perm[:n_train], perm[n_train:]
        train_treated = int(policy[train].sum())
        est_treated = int(policy[est].sum())
        if 0 < train_treated < train.size and 0 < est_treated < est.size:
            if attempt:
                logger.debug(f"Honest split needed {attempt + 1} draws")
            return HonestSplit(train_indices=train, estimation_indices=est)

    raise SplitInfeasibleError(
        f"No split with both arms on both sides after {max_retries} draws"
    )


def honest_split(dataset: Dataset, seed: int, fraction: float = 0.5) -> HonestSplit:
    """Split a dataset 50/50 (by default) into training and estimation samples."""
    return split_indices(dataset.policy, seed, fraction=fraction)
