"""Closed-form PLS coefficients from the Krylov sequence of S_xx and s_xy."""

from dataclasses import dataclass

import numpy as np
from loguru import logger

from src.utils.exceptions import DataError, RankDeficiencyError, ShapeError

CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class KrylovBasis:
    """Krylov matrix R = (s_xy, S_xx s_xy, ..., S_xx^(q-1) s_xy) and its inputs."""

    R: np.ndarray
    S_xx: np.ndarray
    s_xy: np.ndarray

    def __post_init__(self) -> None:
        p = self.S_xx.shape[0]
        if self.S_xx.shape != (p, p) or self.s_xy.shape != (p,) or self.R.shape[0] != p:
            raise ShapeError("Inconsistent Krylov basis shapes")
        if not np.allclose(self.S_xx, self.S_xx.T, rtol=1e-12, atol=1e-14):
            raise DataError("S_xx must be symmetric")
        for name in ("R", "S_xx", "s_xy"):
            getattr(self, name).setflags(write=False)

    @property
    def depth(self) -> int:
        return int(self.R.shape[1])


def build_krylov_basis(features: np.ndarray, outcome: np.ndarray, q: int) -> KrylovBasis:
    """
    Build the Krylov basis of depth q from raw data.

    Uses sample covariances with the n-1 denominator; columns come from
    repeated matrix-vector products, never explicit matrix powers.
    """
    X = np.atleast_2d(np.asarray(features, dtype=np.float64))
    y = np.asarray(outcome, dtype=np.float64).ravel()
    n, p = X.shape
    if not 1 <= q <= p:
        raise DataError(f"Krylov depth must lie in [1, {p}], got {q}")

    Xc = X - X.mean(axis=0)
    yc = y - y.mean()
    S_xx = Xc.T @ Xc / (n - 1)
    S_xx = (S_xx + S_xx.T) / 2
    s_xy = Xc.T @ yc / (n - 1)

    R = np.empty((p, q))
    R[:, 0] = s_xy
    for j in range(1, q):
        R[:, j] = S_xx @ R[:, j - 1]
    return KrylovBasis(R=R, S_xx=S_xx, s_xy=s_xy)


def krylov_coefficients(basis: KrylovBasis, q: int | None = None) -> np.ndarray:
    """
    Closed-form PLS coefficients b = R (R^T S_xx R)^-1 R^T s_xy.

    The estimator is invariant to rescaling the columns of R, so columns are
    normalized before forming the inner matrix; the condition number is
    checked on the normalized matrix.

    Args:
        basis: Krylov basis
        q: Number of leading Krylov columns (defaults to the basis depth)

    Returns:
        Coefficient vector in the feature space of the basis (length p)

    Raises:
        RankDeficiencyError: If the inner matrix has condition number >= 1e12
    """
    q = basis.depth if q is None else q
    if not 1 <= q <= basis.depth:
        raise DataError(f"q must lie in [1, {basis.depth}], got {q}")

    R = basis.R[:, :q]
    norms = np.linalg.norm(R, axis=0)
    if np.any(norms == 0):
        raise RankDeficiencyError("Krylov basis has a zero column; use fewer components")
    R = R / norms

    inner = R.T @ basis.S_xx @ R
    condition = np.linalg.cond(inner)
    if not np.isfinite(condition) or condition >= CONDITION_LIMIT:
        raise RankDeficiencyError(
            f"Krylov inner matrix is singular (condition {condition:.3g}); use fewer components"
        )
    if condition > CONDITION_LIMIT * 1e-4:
        logger.warning(f"Krylov inner matrix is ill-conditioned (condition {condition:.3g})")

    return R @ np.linalg.solve(inner, R.T @ basis.s_xy)
