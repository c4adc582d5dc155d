"""
Linear comparators: ordinary least squares and the LASSO.

The LASSO minimizes (1/2n) ||y - X b||^2 + lambda ||b||_1 over columns
standardized to zero mean and unit (population) variance, with an
unpenalized intercept; coefficients are reported on the original scale.
"""

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from loguru import logger
from sklearn.model_selection import KFold

from src.utils.exceptions import (
    ConfigurationError,
    ConvergenceError,
    ShapeError,
    SingularMatrixError,
)

KKT_TOLERANCE = 1e-6
JITTER = 1e-10
CONDITION_LIMIT = 1e12
MAX_SWEEPS = 100_000


@dataclass(frozen=True)
class LinearFit:
    """Intercept and original-scale coefficients of a linear fit."""

    intercept: float
    coefficients: np.ndarray
    lam: float = 0.0
    method: str = "ols"
    feature_names: tuple[str, ...] = ()
    jittered: bool = False
    sweeps: int = 0

    def __post_init__(self) -> None:
        if not np.all(np.isfinite(self.coefficients)):
            raise ConvergenceError(f"{self.method} produced non-finite coefficients")
        self.coefficients.setflags(write=False)

    @property
    def nonzero(self) -> int:
        return int(np.count_nonzero(self.coefficients))

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.intercept + np.atleast_2d(X) @ self.coefficients

    def to_frame(self) -> pd.DataFrame:
        """One row per term, intercept first."""
        names = self.feature_names or tuple(f"X{j + 1}" for j in range(self.coefficients.size))
        return pd.DataFrame(
            {
                "method": self.method,
                "lambda": self.lam,
                "term": ["Intercept", *names],
                "coefficient": [self.intercept, *self.coefficients.tolist()],
            }
        )


def _validate(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64).ravel()
    if X.shape[0] != y.shape[0]:
        raise ShapeError(f"X has {X.shape[0]} rows but y has {y.shape[0]} entries")
    return X, y


def ols_fit(X: np.ndarray, y: np.ndarray, feature_names: Sequence[str] = ()) -> LinearFit:
    """
    Least squares with an intercept via the centered normal equations.

    An ill-conditioned Gram matrix gets a 1e-10 ridge jitter (flagged on the fit).

    Raises:
        SingularMatrixError: If the design stays singular after the jitter
    """
    X, y = _validate(X, y)
    x_mean, y_mean = X.mean(axis=0), y.mean()
    Xc, yc = X - x_mean, y - y_mean

    gram = Xc.T @ Xc
    jittered = False
    if np.linalg.cond(gram) >= CONDITION_LIMIT:
        gram = gram + JITTER * np.eye(gram.shape[0])
        jittered = True
        logger.warning("OLS design is ill-conditioned; added 1e-10 ridge jitter")
        condition = np.linalg.cond(gram)
        if not np.isfinite(condition) or condition >= 1.0 / np.finfo(float).eps:
            raise SingularMatrixError("OLS design is rank deficient beyond jitter")

    try:
        coef = np.linalg.solve(gram, Xc.T @ yc)
    except np.linalg.LinAlgError as e:
        raise SingularMatrixError(f"OLS normal equations are singular: {e}") from e

    return LinearFit(
        intercept=float(y_mean - x_mean @ coef),
        coefficients=coef,
        method="ols",
        feature_names=tuple(feature_names),
        jittered=jittered,
    )


@dataclass
class _Standardized:
    Z: np.ndarray
    yc: np.ndarray
    x_mean: np.ndarray
    x_scale: np.ndarray
    y_mean: float
    active: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        self.active = self.x_scale > 0

    @classmethod
    def from_data(cls, X: np.ndarray, y: np.ndarray) -> "_Standardized":
        x_mean = X.mean(axis=0)
        x_scale = X.std(axis=0)
        safe = np.where(x_scale > 0, x_scale, 1.0)
        return cls(
            Z=(X - x_mean) / safe,
            yc=y - y.mean(),
            x_mean=x_mean,
            x_scale=x_scale,
            y_mean=float(y.mean()),
        )

    @property
    def n(self) -> int:
        return int(self.Z.shape[0])

    def gradient(self, beta: np.ndarray) -> np.ndarray:
        return self.Z.T @ (self.yc - self.Z @ beta) / self.n

    def to_fit(self, beta: np.ndarray, lam: float, names: Sequence[str], sweeps: int) -> LinearFit:
        coef = np.where(self.active, beta / np.where(self.active, self.x_scale, 1.0), 0.0)
        return LinearFit(
            intercept=float(self.y_mean - self.x_mean @ coef),
            coefficients=coef,
            lam=lam,
            method="lasso",
            feature_names=tuple(names),
            sweeps=sweeps,
        )


def _kkt_residual(gradient: np.ndarray, beta: np.ndarray, lam: float, active: np.ndarray) -> float:
    at_zero = np.maximum(np.abs(gradient) - lam, 0.0)
    off_zero = np.abs(gradient - lam * np.sign(beta))
    violation = np.where(beta == 0, at_zero, off_zero)
    return float(np.max(np.where(active, violation, 0.0), initial=0.0))


def _coordinate_descent(
    data: _Standardized, lam: float, beta: np.ndarray, max_sweeps: int
) -> tuple[np.ndarray, int]:
    beta = beta.copy()
    residual = data.yc - data.Z @ beta
    columns = np.flatnonzero(data.active)

    sweep = 0
    while sweep < max_sweeps:
        sweep += 1
        largest_step = 0.0
        for j in columns:
            z = data.Z[:, j]
            rho = z @ residual / data.n + beta[j]
            updated = np.sign(rho) * max(abs(rho) - lam, 0.0)
            step = updated - beta[j]
            if step != 0.0:
                residual -= step * z
                beta[j] = updated
                largest_step = max(largest_step, abs(step))
        if largest_step <= 1e-12 * max(1.0, float(np.max(np.abs(beta), initial=0.0))):
            break

    violation = _kkt_residual(data.gradient(beta), beta, lam, data.active)
    if violation <= KKT_TOLERANCE:
        return beta, sweep
    raise ConvergenceError(
        f"LASSO did not converge in {sweep} sweeps (KKT violation {violation:.3g})",
        diagnostics={"lambda": lam, "sweeps": sweep, "kkt_violation": violation},
    )


def lasso_fit(
    X: np.ndarray,
    y: np.ndarray,
    lam: float,
    feature_names: Sequence[str] = (),
    max_sweeps: int = MAX_SWEEPS,
) -> LinearFit:
    """
    LASSO by cyclic coordinate descent with soft thresholding.

    Args:
        X: Feature matrix (n x p), standardized internally
        y: Outcome
        lam: Penalty, >= 0
        feature_names: Optional names carried onto the fit
        max_sweeps: Sweep budget

    Returns:
        LinearFit on the original feature scale

    Raises:
        ConvergenceError: If the KKT conditions are not met within max_sweeps
    """
    if lam < 0:
        raise ConfigurationError(f"lambda must be non-negative, got {lam}")
    X, y = _validate(X, y)
    data = _Standardized.from_data(X, y)
    beta, sweeps = _coordinate_descent(data, lam, np.zeros(X.shape[1]), max_sweeps)
    return data.to_fit(beta, lam, feature_names, sweeps)


def lambda_max(X: np.ndarray, y: np.ndarray) -> float:
    """Smallest penalty at which every coefficient is zero."""
    X, y = _validate(X, y)
    data = _Standardized.from_data(X, y)
    return float(np.max(np.abs(data.gradient(np.zeros(X.shape[1])))))


def default_lambda_grid(
    X: np.ndarray, y: np.ndarray, size: int = 50, ratio: float = 1e-3
) -> np.ndarray:
    """Geometric grid from lambda_max down to ratio * lambda_max, ascending."""
    top = lambda_max(X, y)
    return np.sort(np.geomspace(top, top * ratio, size))


def lasso_path(
    X: np.ndarray,
    y: np.ndarray,
    lambdas: Sequence[float],
    feature_names: Sequence[str] = (),
) -> list[LinearFit]:
    """
    Warm-started fits along a grid, returned in the grid's ascending-lambda order.

    A sparsity count that grows with lambda is logged, not raised; LASSO paths
    need not be monotone.
    """
    X, y = _validate(X, y)
    data = _Standardized.from_data(X, y)
    grid = np.sort(np.asarray(lambdas, dtype=np.float64))

    beta = np.zeros(X.shape[1])
    fits: list[LinearFit] = []
    for lam in grid[::-1]:
        beta, sweeps = _coordinate_descent(data, float(lam), beta, MAX_SWEEPS)
        fits.append(data.to_fit(beta, float(lam), feature_names, sweeps))
    fits.reverse()

    nonzero = [fit.nonzero for fit in fits]
    if any(later > earlier for earlier, later in zip(nonzero, nonzero[1:])):
        logger.warning(f"LASSO path sparsity is not monotone in lambda: {nonzero}")
    return fits


def lasso_cv(
    X: np.ndarray,
    y: np.ndarray,
    folds: int = 5,
    lambda_grid: Sequence[float] | None = None,
    seed: int = 0,
    feature_names: Sequence[str] = (),
) -> tuple[float, LinearFit]:
    """
    Choose lambda by K-fold mean out-of-fold squared error, then refit on all rows.

    Ties in the CV error go to the smallest lambda.
    """
    X, y = _validate(X, y)
    grid = default_lambda_grid(X, y) if lambda_grid is None else np.sort(np.asarray(lambda_grid))
    if grid.size == 0:
        raise ConfigurationError("lambda grid must not be empty")

    errors = np.zeros(grid.size)
    for train, test in KFold(n_splits=folds, shuffle=True, random_state=seed).split(X):
        for i, fit in enumerate(lasso_path(X[train], y[train], grid)):
            residual = y[test] - fit.predict(X[test])
            errors[i] += float(residual @ residual)
    errors /= X.shape[0]

    best = float(grid[int(np.argmin(errors))])
    logger.info(f"LASSO CV selected lambda={best:.4g} (MSE {errors.min():.4g})")
    return best, lasso_fit(X, y, best, feature_names=feature_names)


def kkt_violation(fit: LinearFit, X: np.ndarray, y: np.ndarray) -> float:
    """Largest subgradient-optimality violation of a LASSO fit on the standardized scale."""
    X, y = _validate(X, y)
    data = _Standardized.from_data(X, y)
    beta = fit.coefficients * data.x_scale
    return _kkt_residual(data.gradient(beta), beta, fit.lam, data.active)
