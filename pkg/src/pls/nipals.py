"""
Target-component extraction with the NIPALS partial least squares iteration.

Each component takes the unit-normalized covariance vector of the deflated
features with the deflated outcome as its weight, forms the score c = X w,
regresses the residual features and outcome on the score (loading v and
outcome coefficient b) and deflates both before the next component.
"""

from dataclasses import dataclass, field

import numpy as np
from loguru import logger

from src.data.dataset import CenteringStats, Dataset, center, is_centered
from src.utils.exceptions import (
    DataError,
    ResidualExhaustedError,
    ShapeError,
)

RESIDUAL_TOLERANCE = 1e-12


def compute_weight(X_residual: np.ndarray, y_residual: np.ndarray) -> np.ndarray:
    """
    Compute the unit weight vector of the next component.

    Args:
        X_residual: Deflated feature matrix (n x p)
        y_residual: Deflated outcome (length n)

    Returns:
        Covariance vector of the columns with the outcome, normalized to unit length

    Raises:
        ResidualExhaustedError: If every covariance is below 1e-12 in absolute value
    """
    X = np.atleast_2d(np.asarray(X_residual, dtype=np.float64))
    y = np.asarray(y_residual, dtype=np.float64).ravel()
    if X.shape[0] != y.shape[0]:
        raise ShapeError(f"X has {X.shape[0]} rows but y has {y.shape[0]} entries")
    n = X.shape[0]

    covariance = (X - X.mean(axis=0)).T @ (y - y.mean()) / (n - 1)
    if np.max(np.abs(covariance)) < RESIDUAL_TOLERANCE:
        raise ResidualExhaustedError("Residual features carry no covariance with the outcome")
    return covariance / np.linalg.norm(covariance)


@dataclass(frozen=True)
class PlsModel:
    """Fitted single-response PLS model."""

    weights: np.ndarray  # W, p x q
    loadings: np.ndarray  # V, p x q
    scores: np.ndarray  # C, n x q
    outcome_coefficients: np.ndarray  # b, length q
    centering: CenteringStats
    feature_names: tuple[str, ...]
    residual_features: np.ndarray  # E after the last deflation
    residual_outcome: np.ndarray
    requested_components: int
    truncated: bool = False
    _rotation: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        for name in ("weights", "loadings", "scores", "outcome_coefficients"):
            getattr(self, name).setflags(write=False)
        # Score directly from centered features: C = X W (V^T W)^-1
        rotation = self.weights @ np.linalg.inv(self.loadings.T @ self.weights)
        rotation.setflags(write=False)
        object.__setattr__(self, "_rotation", rotation)

    @property
    def n_components(self) -> int:
        return int(self.weights.shape[1])

    @property
    def coefficients(self) -> np.ndarray:
        """Outcome coefficients in the original (unscaled) feature units."""
        return (self._rotation @ self.outcome_coefficients) / self.centering.feature_scales

    @property
    def intercept(self) -> float:
        return float(self.centering.outcome_mean - self.centering.feature_means @ self.coefficients)

    def predict(self, features: np.ndarray, n_components: int | None = None) -> np.ndarray:
        """Predict outcomes for raw feature rows using the first n_components."""
        q = self.n_components if n_components is None else min(n_components, self.n_components)
        scores = project(self, features)[:, :q]
        return self.centering.outcome_mean + scores @ self.outcome_coefficients[:q]


def fit_nipals(
    dataset: Dataset,
    q: int,
    centering: CenteringStats | None = None,
) -> PlsModel:
    """
    Fit q target components to a centered dataset.

    Args:
        dataset: Centered dataset (features and outcome with zero mean)
        q: Number of components, 1 <= q <= p
        centering: Statistics that produced the centered data (identity if omitted)

    Returns:
        PlsModel; truncated (with fewer components) if the residuals are exhausted early

    Raises:
        DataError: If the dataset is not centered or q is out of range
        ResidualExhaustedError: If not even the first component can be extracted
    """
    if not 1 <= q <= dataset.p:
        raise DataError(f"Component count must lie in [1, {dataset.p}], got {q}")
    if not is_centered(dataset):
        raise DataError("fit_nipals expects a centered dataset; call center() first")

    X = np.array(dataset.features, dtype=np.float64, copy=True)
    y = np.array(dataset.outcome, dtype=np.float64, copy=True)
    n, p = X.shape

    weights, loadings, scores, coefs = [], [], [], []
    for j in range(q):
        try:
            w = compute_weight(X, y)
        except ResidualExhaustedError:
            if j == 0:
                raise
            logger.warning(f"PLS residuals exhausted after {j} of {q} components")
            break

        c = X @ w
        cc = float(c @ c)
        v = X.T @ c / cc
        b = float(y @ c) / cc

        X = X - np.outer(c, v)
        y = y - b * c

        weights.append(w)
        loadings.append(v)
        scores.append(c)
        coefs.append(b)

    achieved = len(weights)
    return PlsModel(
        weights=np.column_stack(weights),
        loadings=np.column_stack(loadings),
        scores=np.column_stack(scores),
        outcome_coefficients=np.asarray(coefs),
        centering=centering or CenteringStats.identity(p),
        feature_names=dataset.feature_names,
        residual_features=X,
        residual_outcome=y,
        requested_components=q,
        truncated=achieved < q,
    )


def fit_pls(dataset: Dataset, q: int, scale: bool = False) -> PlsModel:
    """Center (optionally scale) a raw dataset and fit q components."""
    centered, stats = center(dataset, scale=scale)
    return fit_nipals(centered, q, centering=stats)


def project(model: PlsModel, features: np.ndarray) -> np.ndarray:
    """
    Score new raw feature rows on the model's components.

    Rows are centered with the stored statistics, then each weight is applied
    and the stored loading deflated in turn, replaying the fit.

    Args:
        model: Fitted PlsModel
        features: Raw feature matrix (m x p)

    Returns:
        Score matrix (m x q)

    Raises:
        ShapeError: If the column count does not match the model
    """
    X = model.centering.transform(features)
    scores = np.empty((X.shape[0], model.n_components))
    for j in range(model.n_components):
        c = X @ model.weights[:, j]
        X = X - np.outer(c, model.loadings[:, j])
        scores[:, j] = c
    return scores
