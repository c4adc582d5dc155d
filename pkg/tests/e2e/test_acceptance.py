"""
Monte Carlo acceptance studies.

These run full pipelines over many replications; the heavier ones are marked
slow and can be deselected with -m "not slow".
"""

import numpy as np
import pytest
from scipy import stats

from src.baselines.importance import average_importance, regression_tree_importance
from src.baselines.linear import lasso_cv, lasso_fit
from src.estimators import CausalForestEstimator, ForestPLSEstimator
from src.forest.forest import ForestConfig
from src.forest.inference import jackknife_batch
from src.pls.interpretation import direction_cosine, loading_report
from src.pls.nipals import fit_pls, project
from src.pls.selection import select_components_cv
from src.simulation.designs import (
    Design,
    SimulationSpec,
    gen_constant,
    gen_iv,
    gen_rct,
    gen_single_index,
)
from src.simulation.runner import Estimator, run_replications


class TestComponents:
    """PLS direction recovery and component selection."""

    def test_single_index_direction(self) -> None:
        """Test that the one-component direction of a cubic single index tracks b."""
        b = np.array([1.0, 0.5, -0.5, 0.0])
        cosines = []
        for r in range(50):
            data = gen_single_index(5000, seed=r, coefficients=b, intercept=0.5)
            cosines.append(direction_cosine(fit_pls(data, 1).coefficients, b))
        assert np.mean(cosines) >= 0.99

    def test_first_component_loadings(self) -> None:
        """Test that component 1 loads on X1, X2 above X3, X4 in at least 45 of 50 draws."""
        hits = 0
        for r in range(50):
            draw = gen_rct(5000, seed=1000 + r)
            report = loading_report(fit_pls(draw.dataset, 2), draw.dataset)
            coef = report.coefficients["c1"].abs()
            hits += min(coef["X1"], coef["X2"]) > max(coef["X3"], coef["X4"])
        assert hits >= 45

    @pytest.mark.slow
    def test_rct_selects_two_components(self) -> None:
        """Test that five-fold CV selects two components in at least 40 of 50 draws."""
        selected = [
            select_components_cv(gen_rct(1000, seed=2000 + r).dataset, max_q=4, seed=r).selected
            for r in range(50)
        ]
        assert sum(q == 2 for q in selected) >= 40


class TestLasso:
    """LASSO comparison on the randomized design."""

    def test_fixed_penalty_drops_effect_modifiers(self) -> None:
        """Test that lambda = 2.605 zeroes X3, X4 and keeps X1, X2 near 100."""
        hits = 0
        for r in range(50):
            data = gen_rct(1000, seed=3000 + r).dataset
            coef = lasso_fit(data.features, data.outcome, 2.605).coefficients
            assert coef[2] == 0.0 and coef[3] == 0.0
            hits += bool(np.all((coef[:2] >= 90) & (coef[:2] <= 100)))
        assert hits >= 45

    @pytest.mark.slow
    def test_cv_penalty_keeps_effect_modifiers(self) -> None:
        """
        Test that the CV penalty stays below 2.605 and keeps X3 in at least 45 of 50 draws.

        X3 and X4 project onto the outcome with slopes near 0.5 and 0.25, well
        above their sampling error at n = 1000, so out-of-fold error favors
        keeping them. Only the larger fixed penalty drops them.
        """
        kept = 0
        for r in range(50):
            data = gen_rct(1000, seed=3000 + r).dataset
            best, fit = lasso_cv(data.features, data.outcome, seed=r)
            assert best < 2.605
            kept += fit.coefficients[2] != 0.0
        assert kept >= 45


@pytest.mark.slow
class TestForestStudies:
    """Forest-PLS effect recovery and inference."""

    def test_constant_effect(self) -> None:
        """Test that the mean predicted effect is within 0.05 of 1 over 20 draws."""
        config = ForestConfig(n_trees=500)
        means = [
            ForestPLSEstimator(config, components=2).estimate(gen_constant(2000, r).dataset, r)
            .effects.mean()
            for r in range(20)
        ]
        assert abs(np.mean(means) - 1.0) <= 0.05

    def test_rct_effect_moments(self, effect_moments) -> None:
        """Test the mean (within 0.15) and variance (within 35%) of randomized-design effects."""
        oracle = effect_moments["rct"]
        config = ForestConfig(n_trees=1000)
        means, variances = [], []
        for r in range(10):
            draw = gen_rct(5000, seed=4000 + r)
            effects = ForestPLSEstimator(config).estimate(draw.dataset, r).effects
            means.append(effects.mean())
            variances.append(effects.var(ddof=1))
        assert abs(np.mean(means) - oracle["mean"]) <= 0.15
        assert abs(np.mean(variances) - oracle["variance"]) <= 0.35 * oracle["variance"]

    def test_effect_modifiers_lead_importance(self) -> None:
        """Test that X3 and X4 outweigh X1 and X2 in the importance of Forest-PLS effects."""
        config = ForestConfig(n_trees=1000)
        reports = []
        for r in range(3):
            data = gen_rct(5000, seed=4500 + r).dataset
            report = ForestPLSEstimator(config).estimate(data, r)
            features = data.features[report.evaluation_indices]
            reports.append(regression_tree_importance(features, report.effects))
        shares = average_importance(reports).shares
        assert shares[2] + shares[3] > shares[0] + shares[1]

    def test_small_sample_density_distance(self) -> None:
        """Test that at n = 70 Forest-PLS is no farther from the true density than the forest."""
        spec = SimulationSpec(Design.RCT, 70, seed=8)
        config = ForestConfig(n_trees=1000)
        pls = run_replications(spec, Estimator.FOREST_PLS, replications=50, forest_config=config)
        raw = run_replications(
            spec, Estimator.CAUSAL_FOREST, replications=50, forest_config=config
        )
        assert pls.mean_l1() <= raw.mean_l1()

    def test_iv_bias_shared(self) -> None:
        """Test that both forests are biased the same way under an endogenous policy."""
        config = ForestConfig(n_trees=1000)
        pls_bias, raw_bias = [], []
        for r in range(50):
            data = gen_iv(1000, seed=5000 + r).dataset
            pls = ForestPLSEstimator(config).estimate(data, r).effects.mean()
            raw = CausalForestEstimator(config).estimate(data, r).effects.mean()
            pls_bias.append(pls + 0.5)
            raw_bias.append(raw + 0.5)
        first, second = np.mean(pls_bias), np.mean(raw_bias)
        assert np.sign(first) == np.sign(second)
        assert 0.5 <= abs(first) / abs(second) <= 2.0

    def test_jackknife_coverage(self) -> None:
        """Test that 95% intervals cover a constant effect of 1 in at least 85% of draws."""
        config = ForestConfig(n_trees=1000)
        reps = 200
        point_coverage, center_covered = [], 0
        for r in range(reps):
            data = gen_constant(400, seed=6000 + r).dataset
            estimator = ForestPLSEstimator(config, components=2)
            estimates = estimator.estimate(data, r).estimates
            # Every estimation-half point, as reported by analyze
            point_coverage.append(np.mean((estimates.ci_low <= 1.0) & (1.0 <= estimates.ci_high)))
            center = project(estimator.model, data.features.mean(axis=0, keepdims=True))
            at_center = jackknife_batch(estimator.forest, center)[0]
            center_covered += at_center.ci_low <= 1.0 <= at_center.ci_high
        assert np.mean(point_coverage) >= 0.85
        assert center_covered >= 0.85 * reps

    def test_standardized_effect_is_normal(self) -> None:
        """Test that the standardized effect at a fixed point passes Anderson-Darling at 1%."""
        config = ForestConfig(n_trees=1000)
        point = np.array([[-1.0, 1.0, 2.0, 0.0]])
        effects, errors = [], []
        for r in range(200):
            data = gen_rct(400, seed=7000 + r).dataset
            report = ForestPLSEstimator(config, components=2).estimate(data, r, points=point)
            effects.append(report.estimates[0].point)
            errors.append(report.estimates[0].std_error)
        effects = np.asarray(effects)
        errors = np.asarray(errors)
        # Clamped draws carry no variance estimate
        kept = errors > 0
        assert kept.mean() >= 0.95
        standardized = (effects[kept] - effects.mean()) / errors[kept]
        result = stats.anderson(standardized, dist="norm")
        # critical_values[-1] is the 1% level
        assert result.statistic < result.critical_values[-1]
