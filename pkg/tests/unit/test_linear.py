"""Tests for the OLS and LASSO comparators."""

import numpy as np
import pytest
from sklearn.linear_model import Lasso

from src.baselines.linear import (
    default_lambda_grid,
    kkt_violation,
    lambda_max,
    lasso_cv,
    lasso_fit,
    lasso_path,
    ols_fit,
)
from src.utils.exceptions import ConfigurationError, ShapeError


def _linear(seed: int, n: int = 200, noise: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    X = rng.normal(loc=1.0, size=(n, 4)) * np.array([1.0, 2.0, 0.5, 1.0])
    y = 1.5 + X @ np.array([2.0, -1.0, 0.0, 0.5]) + noise * rng.normal(size=n)
    return X, y


class TestOls:
    """ols_fit()."""

    def test_exact_line(self) -> None:
        """Test that y = 2x gives slope 2 and intercept 0."""
        x = np.arange(10.0).reshape(-1, 1)
        fit = ols_fit(x, 2 * x.ravel())
        assert fit.coefficients[0] == pytest.approx(2.0)
        assert fit.intercept == pytest.approx(0.0, abs=1e-12)

    def test_constant_outcome(self, rng: np.random.Generator) -> None:
        """Test that y = 5 gives zero slopes and intercept 5."""
        X = rng.normal(size=(50, 3))
        fit = ols_fit(X, np.full(50, 5.0))
        np.testing.assert_allclose(fit.coefficients, 0.0, atol=1e-12)
        assert fit.intercept == pytest.approx(5.0)

    def test_normal_equations_oracle(self) -> None:
        """Test against a least-squares solve with an intercept column."""
        X, y = _linear(0)
        fit = ols_fit(X, y)
        design = np.column_stack([np.ones(len(y)), X])
        expected, *_ = np.linalg.lstsq(design, y, rcond=None)
        assert fit.intercept == pytest.approx(expected[0])
        np.testing.assert_allclose(fit.coefficients, expected[1:], rtol=1e-9)
        assert not fit.jittered

    def test_collinear_jitter(self, rng: np.random.Generator, warnings_log: list[str]) -> None:
        """Test that duplicated columns get the ridge jitter and a finite fit."""
        x = rng.normal(size=100)
        fit = ols_fit(np.column_stack([x, x]), 3 * x)
        assert fit.jittered
        assert np.all(np.isfinite(fit.coefficients))
        assert fit.coefficients.sum() == pytest.approx(3.0, rel=1e-6)
        assert any("ill-conditioned" in m for m in warnings_log)

    def test_row_mismatch(self) -> None:
        """Test that X and y must agree in length."""
        with pytest.raises(ShapeError):
            ols_fit(np.zeros((5, 2)), np.zeros(4))

    def test_frame(self) -> None:
        """Test the term table."""
        X, y = _linear(1)
        frame = ols_fit(X, y, feature_names=["a", "b", "c", "d"]).to_frame()
        assert list(frame["term"]) == ["Intercept", "a", "b", "c", "d"]
        assert set(frame["method"]) == {"ols"}


class TestLasso:
    """lasso_fit() and lambda_max()."""

    def test_zero_penalty_is_ols(self) -> None:
        """Test that lambda = 0 matches OLS within 1e-6."""
        X, y = _linear(2)
        lasso, ols = lasso_fit(X, y, 0.0), ols_fit(X, y)
        np.testing.assert_allclose(lasso.coefficients, ols.coefficients, atol=1e-6)
        assert lasso.intercept == pytest.approx(ols.intercept, abs=1e-6)

    @pytest.mark.parametrize("factor", [1.01, 10.0])
    def test_above_lambda_max(self, factor: float) -> None:
        """Test that lambda above lambda_max zeroes every coefficient."""
        X, y = _linear(3)
        fit = lasso_fit(X, y, factor * lambda_max(X, y))
        assert fit.nonzero == 0
        assert fit.intercept == pytest.approx(y.mean())

    @pytest.mark.parametrize("lam", [0.01, 0.1, 0.5])
    def test_kkt(self, lam: float) -> None:
        """Test that the fit satisfies the optimality conditions to 1e-6."""
        X, y = _linear(4)
        fit = lasso_fit(X, y, lam)
        assert kkt_violation(fit, X, y) <= 1e-6

    def test_shrinks_noise_column(self) -> None:
        """Test that a moderate penalty drops the irrelevant column."""
        X, y = _linear(5, n=1000)
        fit = lasso_fit(X, y, 0.2)
        assert fit.coefficients[2] == 0.0
        assert fit.coefficients[0] > 0

    def test_constant_column(self, rng: np.random.Generator) -> None:
        """Test that a zero-variance column keeps a zero coefficient."""
        X = np.column_stack([rng.normal(size=80), np.ones(80)])
        fit = lasso_fit(X, 2 * X[:, 0], 0.01)
        assert fit.coefficients[1] == 0.0

    @pytest.mark.parametrize("lam", [0.05, 0.3, 1.0])
    def test_matches_sklearn(self, lam: float) -> None:
        """Test agreement with scikit-learn's Lasso on standardized columns."""
        X, y = _linear(14, n=300)
        fit = lasso_fit(X, y, lam)
        scale = X.std(axis=0)
        reference = Lasso(alpha=lam, fit_intercept=True, tol=1e-12, max_iter=1_000_000)
        reference.fit((X - X.mean(axis=0)) / scale, y)
        np.testing.assert_allclose(fit.coefficients * scale, reference.coef_, atol=1e-5)
        expected_intercept = reference.intercept_ - (X.mean(axis=0) / scale) @ reference.coef_
        assert fit.intercept == pytest.approx(expected_intercept, abs=1e-5)

    def test_negative_lambda(self) -> None:
        """Test that a negative penalty is rejected."""
        X, y = _linear(6)
        with pytest.raises(ConfigurationError):
            lasso_fit(X, y, -0.1)


class TestLassoPath:
    """lasso_path() and default_lambda_grid()."""

    def test_grid(self) -> None:
        """Test an ascending geometric grid topped by lambda_max."""
        X, y = _linear(7)
        grid = default_lambda_grid(X, y, size=10)
        assert np.all(np.diff(grid) > 0)
        assert grid[-1] == pytest.approx(lambda_max(X, y))
        assert grid[0] == pytest.approx(1e-3 * lambda_max(X, y))

    def test_path_matches_cold_fits(self) -> None:
        """Test that warm-started fits equal independent fits."""
        X, y = _linear(8)
        grid = [0.05, 0.3, 1.0]
        for fit, lam in zip(lasso_path(X, y, grid[::-1]), grid):
            assert fit.lam == lam
            cold = lasso_fit(X, y, lam)
            np.testing.assert_allclose(fit.coefficients, cold.coefficients, atol=1e-6)

    def test_sparsity_decreases(self) -> None:
        """Test that sparsity grows toward lambda_max on an uncorrelated design."""
        X, y = _linear(9, n=500)
        fits = lasso_path(X, y, default_lambda_grid(X, y, size=20))
        counts = [fit.nonzero for fit in fits]
        assert counts[-1] == 0
        assert counts[0] >= 3
        assert counts == sorted(counts, reverse=True)


class TestLassoCv:
    """lasso_cv()."""

    def test_noiseless_picks_smallest(self) -> None:
        """Test that noiseless data selects the smallest penalty on the grid."""
        X, y = _linear(10, noise=0.0)
        best, fit = lasso_cv(X, y, lambda_grid=[1.0, 0.1, 0.01, 0.001], seed=1)
        assert best == 0.001
        assert fit.lam == 0.001

    def test_single_value_grid(self) -> None:
        """Test that a one-point grid returns that point."""
        X, y = _linear(11)
        best, _ = lasso_cv(X, y, lambda_grid=[0.3])
        assert best == 0.3

    def test_deterministic(self) -> None:
        """Test that the fold seed fixes the selection."""
        X, y = _linear(12)
        assert lasso_cv(X, y, seed=4)[0] == lasso_cv(X, y, seed=4)[0]

    def test_empty_grid(self) -> None:
        """Test that an empty grid is rejected."""
        X, y = _linear(13)
        with pytest.raises(ConfigurationError):
            lasso_cv(X, y, lambda_grid=[])
