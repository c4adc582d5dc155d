"""Partial least squares target components."""

from src.pls.interpretation import LoadingReport, dominant_features, loading_report
from src.pls.krylov import KrylovBasis, build_krylov_basis, krylov_coefficients
from src.pls.nipals import PlsModel, compute_weight, fit_nipals, fit_pls, project
from src.pls.selection import ComponentSelection, select_components_cv

__all__ = [
    "ComponentSelection",
    "KrylovBasis",
    "LoadingReport",
    "PlsModel",
    "build_krylov_basis",
    "compute_weight",
    "dominant_features",
    "fit_nipals",
    "fit_pls",
    "krylov_coefficients",
    "loading_report",
    "project",
    "select_components_cv",
]
