"""Variable importance from a regression tree fitted to estimated policy effects."""

from collections.abc import Sequence
from dataclasses import dataclass
from math import ceil

import numpy as np
import pandas as pd
from loguru import logger

from src.utils.exceptions import InsufficientDataError, ShapeError

MIN_SPLIT = 20
RELATIVE_GAIN = 1e-12


@dataclass(frozen=True)
class ImportanceReport:
    """Normalized squared-error-reduction shares per feature."""

    shares: np.ndarray
    feature_names: tuple[str, ...]
    method: str = "cart-sse"
    uniform_fallback: bool = False

    def to_frame(self, label: str | None = None) -> pd.DataFrame:
        frame = pd.DataFrame({"feature": self.feature_names, "share": self.shares})
        if label is not None:
            frame.insert(0, "estimator", label)
        return frame


def _best_variance_split(
    X: np.ndarray, y: np.ndarray, min_child: int
) -> tuple[int, float, float] | None:
    n = X.shape[0]
    n_left = np.arange(1, n)
    total = y.sum()
    base = total**2 / n

    best: tuple[int, float, float] | None = None
    for j in range(X.shape[1]):
        order = np.argsort(X[:, j], kind="stable")
        xs, ys = X[order, j], y[order]
        s_left = np.cumsum(ys)[:-1]
        gain = s_left**2 / n_left + (total - s_left) ** 2 / (n - n_left) - base
        admissible = (xs[:-1] < xs[1:]) & (n_left >= min_child) & (n - n_left >= min_child)
        if not admissible.any():
            continue
        gain = np.where(admissible, gain, -np.inf)
        i = int(np.argmax(gain))
        if best is None or gain[i] > best[2] * (1 + RELATIVE_GAIN):
            best = (j, float((xs[i] + xs[i + 1]) / 2), float(gain[i]))
    return best


def regression_tree_importance(
    features: np.ndarray,
    effects: np.ndarray,
    feature_names: Sequence[str] | None = None,
    alpha: float = 0.1,
    k: int = 10,
    min_split: int = MIN_SPLIT,
) -> ImportanceReport:
    """
    Grow an unpruned CART tree on the effects and attribute its SSE reductions.

    Nodes with at least min_split observations are split on the variance
    reduction criterion, subject to children of at least
    max(ceil(alpha * n), k) observations. Each feature's share is the total
    reduction from splits on it over the total reduction. Constant effects
    give uniform shares with the fallback flag set.

    Args:
        features: Feature matrix (n x p)
        effects: Estimated policy effects (length n)
        feature_names: Column names (X1..Xp if omitted)
        alpha: Minimum child fraction
        k: Minimum child size
        min_split: Smallest node that is split

    Returns:
        ImportanceReport
    """
    X = np.atleast_2d(np.asarray(features, dtype=np.float64))
    y = np.asarray(effects, dtype=np.float64).ravel()
    n, p = X.shape
    if y.shape[0] != n:
        raise ShapeError(f"features have {n} rows but effects have {y.shape[0]} entries")
    if n < MIN_SPLIT:
        raise InsufficientDataError(f"Variable importance needs at least {MIN_SPLIT} rows, got {n}")
    if feature_names is None:
        feature_names = [f"X{j + 1}" for j in range(p)]
    names = tuple(feature_names)

    reduction = np.zeros(p)
    stack = [np.arange(n)]
    while stack:
        rows = stack.pop()
        if rows.size < min_split:
            continue
        y_node = y[rows] - y[rows].mean()
        if np.ptp(y_node) <= RELATIVE_GAIN * max(1.0, float(np.abs(y[rows]).max())):
            continue
        node_sse = float(y_node @ y_node)
        split = _best_variance_split(X[rows], y_node, max(ceil(alpha * rows.size), k))
        if split is None or split[2] <= RELATIVE_GAIN * node_sse:
            continue
        j, threshold, gain = split
        reduction[j] += gain
        go_left = X[rows, j] <= threshold
        stack.extend([rows[~go_left], rows[go_left]])

    total = reduction.sum()
    if total <= 0.0:
        logger.warning("Effects are constant; variable importance falls back to uniform shares")
        return ImportanceReport(
            shares=np.full(p, 1.0 / p), feature_names=names, uniform_fallback=True
        )
    return ImportanceReport(shares=reduction / total, feature_names=names)


def average_importance(reports: Sequence[ImportanceReport]) -> ImportanceReport:
    """Mean shares over replications."""
    shares = np.mean([report.shares for report in reports], axis=0)
    return ImportanceReport(
        shares=shares / shares.sum(),
        feature_names=reports[0].feature_names,
        method=reports[0].method,
        uniform_fallback=all(report.uniform_fallback for report in reports),
    )
