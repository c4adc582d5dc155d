"""Interpretation of target components by regression on the original features."""

from dataclasses import dataclass

import numpy as np
import pandas as pd

from src.data.dataset import Dataset
from src.pls.nipals import PlsModel, project

INTERCEPT = "Constant"


@dataclass(frozen=True)
class LoadingReport:
    """Per-component OLS coefficients of scores on the features plus intercept."""

    coefficients: pd.DataFrame  # rows: features + Constant, columns: components
    std_errors: pd.DataFrame
    r_squared: pd.Series
    n_obs: int

    def to_frame(self) -> pd.DataFrame:
        """Table layout: one row per term, coefficient and standard error per component."""
        columns = {}
        for component in self.coefficients.columns:
            columns[f"{component}_coef"] = self.coefficients[component]
            columns[f"{component}_se"] = self.std_errors[component]
        frame = pd.DataFrame(columns)
        frame.index.name = "term"
        return frame


def loading_report(model: PlsModel, dataset: Dataset) -> LoadingReport:
    """
    Regress each component's scores on the raw features with an intercept.

    Scores are exact linear functions of the features, so R^2 is one up to
    rounding and the standard errors are essentially zero.
    """
    scores = project(model, dataset.features)
    design = np.column_stack([dataset.features, np.ones(dataset.n)])
    n, k = design.shape

    coef, _, rank, _ = np.linalg.lstsq(design, scores, rcond=None)
    fitted = design @ coef
    residuals = scores - fitted

    dof = max(n - rank, 1)
    sigma2 = (residuals**2).sum(axis=0) / dof
    gram_inv = np.linalg.pinv(design.T @ design)
    se = np.sqrt(np.outer(np.diag(gram_inv), sigma2).clip(min=0.0))

    centered = scores - scores.mean(axis=0)
    total = (centered**2).sum(axis=0)
    r2 = 1.0 - (residuals**2).sum(axis=0) / np.where(total > 0, total, 1.0)

    terms = list(model.feature_names) + [INTERCEPT]
    components = [f"c{j + 1}" for j in range(model.n_components)]
    return LoadingReport(
        coefficients=pd.DataFrame(coef, index=terms, columns=components),
        std_errors=pd.DataFrame(se, index=terms, columns=components),
        r_squared=pd.Series(r2, index=components),
        n_obs=n,
    )


def dominant_features(report: LoadingReport, component: int, top: int = 2) -> list[str]:
    """
    Features with the largest absolute coefficients on a component (1-based).

    Ties keep feature order.
    """
    column = report.coefficients.iloc[:-1, component - 1].abs()
    order = np.argsort(-column.to_numpy(), kind="stable")
    return [str(column.index[i]) for i in order[:top]]


def direction_cosine(estimated: np.ndarray, truth: np.ndarray) -> float:
    """Absolute cosine similarity between an estimated and a true coefficient direction."""
    a = np.asarray(estimated, dtype=np.float64)
    b = np.asarray(truth, dtype=np.float64)
    return float(abs(a @ b) / (np.linalg.norm(a) * np.linalg.norm(b)))
