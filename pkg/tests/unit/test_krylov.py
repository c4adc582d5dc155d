"""Tests for closed-form PLS coefficients from the Krylov sequence."""

import numpy as np
import pytest

from src.data.dataset import Dataset
from src.pls.krylov import KrylovBasis, build_krylov_basis, krylov_coefficients
from src.pls.nipals import fit_pls
from src.utils.exceptions import DataError, RankDeficiencyError


def _design(seed: int, p: int, n: int = 400) -> tuple[np.ndarray, np.ndarray]:
    """Gaussian columns with distinct scales so the Krylov columns stay well separated."""
    rng = np.random.default_rng(seed)
    X = rng.normal(loc=2.0, size=(n, p)) * np.linspace(1.0, 2.0, p)
    y = X @ rng.normal(size=p) + 0.5 * rng.normal(size=n)
    return X, y


class TestBuildKrylovBasis:
    """build_krylov_basis()."""

    def test_columns(self) -> None:
        """Test that column j equals S_xx^j s_xy."""
        X, y = _design(0, 3)
        basis = build_krylov_basis(X, y, 3)
        S = np.cov(X, rowvar=False)
        s = np.cov(np.column_stack([X, y]), rowvar=False)[:3, 3]
        np.testing.assert_allclose(basis.R[:, 0], s, atol=1e-12)
        np.testing.assert_allclose(basis.R[:, 2], S @ S @ s, rtol=1e-10)
        assert basis.depth == 3

    def test_depth_range(self) -> None:
        """Test that depth must lie in [1, p]."""
        X, y = _design(0, 2)
        with pytest.raises(DataError):
            build_krylov_basis(X, y, 3)

    def test_asymmetric_rejected(self) -> None:
        """Test that a non-symmetric S_xx is rejected."""
        with pytest.raises(DataError):
            KrylovBasis(
                R=np.ones((2, 1)), S_xx=np.array([[1.0, 0.5], [0.0, 1.0]]), s_xy=np.ones(2)
            )


class TestKrylovCoefficients:
    """krylov_coefficients()."""

    def test_identity_covariance(self) -> None:
        """Test that q = 1 with S_xx = I returns s_xy."""
        s = np.array([0.3, -1.2, 2.0])
        basis = KrylovBasis(R=s.reshape(-1, 1).copy(), S_xx=np.eye(3), s_xy=s.copy())
        np.testing.assert_allclose(krylov_coefficients(basis), s, atol=1e-14)

    @pytest.mark.parametrize("p", [2, 3, 4])
    def test_full_depth_is_ols(self, p: int) -> None:
        """Test that q = p gives S_xx^-1 s_xy."""
        X, y = _design(p, p)
        basis = build_krylov_basis(X, y, p)
        expected = np.linalg.solve(basis.S_xx, basis.s_xy)
        np.testing.assert_allclose(krylov_coefficients(basis), expected, rtol=1e-8, atol=1e-10)

    @pytest.mark.parametrize("seed", range(4))
    @pytest.mark.parametrize("p", [2, 3, 4])
    def test_matches_nipals(self, seed: int, p: int) -> None:
        """Test that closed-form and NIPALS coefficients agree for every q."""
        X, y = _design(10 * seed + p, p)
        data = Dataset(
            features=X,
            outcome=y,
            policy=np.zeros(X.shape[0]),
            feature_names=tuple(f"x{j + 1}" for j in range(p)),
        )
        basis = build_krylov_basis(X, y, p)
        for q in range(1, p + 1):
            nipals = fit_pls(data, q).coefficients
            np.testing.assert_allclose(
                krylov_coefficients(basis, q), nipals, rtol=1e-6, atol=1e-9
            )

    def test_collinear_basis(self) -> None:
        """Test that a singular inner matrix raises a rank-deficiency error."""
        rng = np.random.default_rng(5)
        x = rng.normal(size=100)
        X = np.column_stack([x, x])
        basis = build_krylov_basis(X, x, 2)
        with pytest.raises(RankDeficiencyError, match="fewer components"):
            krylov_coefficients(basis)

    def test_q_range(self) -> None:
        """Test that q beyond the basis depth is rejected."""
        X, y = _design(1, 3)
        with pytest.raises(DataError):
            krylov_coefficients(build_krylov_basis(X, y, 2), 3)
