"""Cross-validated choice of the number of target components."""

from dataclasses import dataclass

import numpy as np
from loguru import logger
from sklearn.model_selection import KFold

from src.data.dataset import Dataset
from src.pls.nipals import fit_pls
from src.utils.exceptions import DataError

STABILIZATION_TOLERANCE = 0.01


@dataclass(frozen=True)
class ComponentSelection:
    """Selected component count and the RMSEP curve it was read from."""

    selected: int
    rmsep: np.ndarray  # rmsep[q - 1] for q = 1..max_q
    folds: int

    @property
    def max_components(self) -> int:
        return int(self.rmsep.shape[0])

    def as_rows(self) -> list[dict[str, float]]:
        return [{"components": q + 1, "rmsep": float(r)} for q, r in enumerate(self.rmsep)]


def stabilized_count(rmsep: np.ndarray, tolerance: float = STABILIZATION_TOLERANCE) -> int:
    """
    Smallest q after which the RMSEP curve has stabilized.

    A count qualifies once the error it leaves above the curve minimum is at
    most tolerance times the one-component RMSEP.
    """
    best = float(np.min(rmsep))
    within = np.flatnonzero(rmsep - best <= tolerance * float(rmsep[0]))
    return int(within[0]) + 1


def select_components_cv(
    dataset: Dataset,
    folds: int = 5,
    max_q: int | None = None,
    seed: int = 0,
    scale: bool = False,
    tolerance: float = STABILIZATION_TOLERANCE,
) -> ComponentSelection:
    """
    Choose the component count by K-fold cross-validated prediction error.

    Each fold is centered (and optionally scaled) with its own training
    statistics. A fit truncated by exhausted residuals predicts with its last
    achieved component for larger q.

    Args:
        dataset: Raw dataset
        folds: Number of folds (five in every reported experiment)
        max_q: Largest component count tried (defaults to p)
        seed: Fold-assignment seed
        scale: Standardize features within each training fold
        tolerance: Relative stabilization tolerance on the RMSEP curve

    Returns:
        ComponentSelection with the selected q and the per-q RMSEP curve
    """
    max_q = dataset.p if max_q is None else max_q
    if not 1 <= max_q <= dataset.p:
        raise DataError(f"max_q must lie in [1, {dataset.p}], got {max_q}")
    if dataset.n < folds:
        raise DataError(f"Need at least {folds} rows for {folds}-fold CV, got {dataset.n}")

    squared_errors = np.zeros(max_q)
    splitter = KFold(n_splits=folds, shuffle=True, random_state=seed)
    for fold, (train, test) in enumerate(splitter.split(dataset.features)):
        model = fit_pls(dataset.subset(train), max_q, scale=scale)
        X_test = dataset.features[test]
        y_test = dataset.outcome[test]
        for q in range(1, max_q + 1):
            residual = y_test - model.predict(X_test, n_components=q)
            squared_errors[q - 1] += float(residual @ residual)
        logger.debug(f"CV fold {fold + 1}/{folds}: {model.n_components} components fitted")

    rmsep = np.sqrt(squared_errors / dataset.n)
    selected = stabilized_count(rmsep, tolerance)
    logger.info(
        f"Selected {selected} component(s) by {folds}-fold CV "
        f"(RMSEP {', '.join(f'{r:.4f}' for r in rmsep)})"
    )
    return ComponentSelection(selected=selected, rmsep=rmsep, folds=folds)
