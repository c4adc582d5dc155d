"""Kernel density summaries of effect distributions."""

from collections.abc import Sequence

import numpy as np
from scipy.integrate import trapezoid
from scipy.stats import gaussian_kde

from src.utils.exceptions import DataError, InsufficientDataError, PointMassError

GRID_SIZE = 512
GRID_PADDING = 3.0  # bandwidths beyond the pooled range


def _checked(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64).ravel()
    if values.size < 2:
        raise InsufficientDataError(f"A density needs at least 2 values, got {values.size}")
    if not np.isfinite(values).all():
        raise DataError("Density input contains non-finite values")
    if np.ptp(values) == 0:
        raise PointMassError(f"All {values.size} values equal {values[0]:g}; no density exists")
    return values


def silverman_bandwidth(values: np.ndarray) -> float:
    """1.06 * sample std * n^(-1/5)."""
    values = _checked(values)
    return float(1.06 * values.std(ddof=1) * values.size ** (-0.2))


def kde(values: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Gaussian kernel density of values on grid with the Silverman bandwidth."""
    values = _checked(values)
    estimator = gaussian_kde(values, bw_method=1.06 * values.size ** (-0.2))
    return estimator(np.asarray(grid, dtype=np.float64))


def density_grid(samples: Sequence[np.ndarray], size: int = GRID_SIZE) -> np.ndarray:
    """Equally spaced grid over the pooled range of samples, padded by 3 bandwidths."""
    pooled = np.concatenate([np.asarray(s, dtype=np.float64).ravel() for s in samples])
    padding = GRID_PADDING * max(silverman_bandwidth(s) for s in samples)
    return np.linspace(pooled.min() - padding, pooled.max() + padding, size)


def trapezoid_mass(density: np.ndarray, grid: np.ndarray) -> float:
    return float(trapezoid(density, grid))


def l1_distance(first: np.ndarray, second: np.ndarray, grid: np.ndarray) -> float:
    """Integrated absolute difference between two densities on a shared grid."""
    return float(trapezoid(np.abs(np.asarray(first) - np.asarray(second)), grid))
