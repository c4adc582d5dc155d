"""Tests for regression-tree variable importance."""

import numpy as np
import pytest

from src.baselines.importance import (
    ImportanceReport,
    average_importance,
    regression_tree_importance,
)
from src.utils.exceptions import InsufficientDataError, ShapeError


class TestRegressionTreeImportance:
    """regression_tree_importance()."""

    def test_step_function(self, rng: np.random.Generator) -> None:
        """Test that a step in X1 takes more than 90% of the importance."""
        X = rng.normal(size=(500, 4))
        effects = 2.5 * (X[:, 0] > 0) + 0.1 * rng.normal(size=500)
        report = regression_tree_importance(X, effects)
        assert report.shares[0] > 0.9
        assert report.shares.sum() == pytest.approx(1.0)
        assert not report.uniform_fallback

    def test_pure_step(self, rng: np.random.Generator) -> None:
        """Test that a noiseless step puts every share on its feature."""
        X = rng.normal(size=(200, 3))
        report = regression_tree_importance(X, np.where(X[:, 1] > 0.3, 1.0, -1.0))
        np.testing.assert_allclose(report.shares, [0.0, 1.0, 0.0])

    def test_constant_effects(self, rng: np.random.Generator, warnings_log: list[str]) -> None:
        """Test that constant effects fall back to uniform shares."""
        report = regression_tree_importance(rng.normal(size=(100, 4)), np.full(100, 1.0))
        np.testing.assert_allclose(report.shares, 0.25)
        assert report.uniform_fallback
        assert any("uniform" in m for m in warnings_log)

    def test_affine_effects(self, rng: np.random.Generator) -> None:
        """Test that shares do not change when the effects are rescaled and shifted."""
        X = rng.normal(size=(400, 4))
        effects = X[:, 2] + 0.3 * X[:, 0] * X[:, 3] + 0.2 * rng.normal(size=400)
        base = regression_tree_importance(X, effects)
        moved = regression_tree_importance(X, 3.0 * effects + 0.5)
        np.testing.assert_allclose(moved.shares, base.shares, rtol=0, atol=1e-9)

    def test_affine_features(self, rng: np.random.Generator) -> None:
        """Test that shares do not change under positive per-feature rescaling."""
        X = rng.normal(size=(400, 4))
        effects = X[:, 2] + 0.3 * X[:, 0] * X[:, 3] + 0.2 * rng.normal(size=400)
        base = regression_tree_importance(X, effects)
        rescaled = X * [2.0, 0.5, 10.0, 1.5] + [1.0, -3.0, 0.0, 7.0]
        moved = regression_tree_importance(rescaled, effects)
        np.testing.assert_allclose(moved.shares, base.shares, rtol=0, atol=1e-9)

    def test_default_names(self, rng: np.random.Generator) -> None:
        """Test X1..Xp names when none are given."""
        X = rng.normal(size=(50, 2))
        report = regression_tree_importance(X, X[:, 0])
        assert report.feature_names == ("X1", "X2")

    def test_too_few_rows(self, rng: np.random.Generator) -> None:
        """Test that fewer than 20 rows are rejected."""
        with pytest.raises(InsufficientDataError):
            regression_tree_importance(rng.normal(size=(19, 2)), rng.normal(size=19))

    def test_row_mismatch(self, rng: np.random.Generator) -> None:
        """Test that effects must match the feature rows."""
        with pytest.raises(ShapeError):
            regression_tree_importance(rng.normal(size=(30, 2)), rng.normal(size=29))


class TestAverageImportance:
    """average_importance()."""

    def test_mean_shares(self) -> None:
        """Test that shares average across replications."""
        names = ("a", "b")
        reports = [
            ImportanceReport(shares=np.array([1.0, 0.0]), feature_names=names),
            ImportanceReport(shares=np.array([0.5, 0.5]), feature_names=names),
        ]
        averaged = average_importance(reports)
        np.testing.assert_allclose(averaged.shares, [0.75, 0.25])
        assert not averaged.uniform_fallback

    def test_frame_label(self) -> None:
        """Test the labelled table layout."""
        report = ImportanceReport(shares=np.array([0.4, 0.6]), feature_names=("a", "b"))
        frame = report.to_frame("forest-pls")
        assert list(frame.columns) == ["estimator", "feature", "share"]
