"""OLS, LASSO and regression-tree importance comparators."""

from src.baselines.importance import (
    ImportanceReport,
    average_importance,
    regression_tree_importance,
)
from src.baselines.linear import (
    LinearFit,
    kkt_violation,
    lambda_max,
    lasso_cv,
    lasso_fit,
    lasso_path,
    ols_fit,
)

__all__ = [
    "ImportanceReport",
    "LinearFit",
    "average_importance",
    "kkt_violation",
    "lambda_max",
    "lasso_cv",
    "lasso_fit",
    "lasso_path",
    "ols_fit",
    "regression_tree_importance",
]
