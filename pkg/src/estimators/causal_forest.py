"""Plain causal forest on the raw features, the comparator of Forest-PLS."""

from dataclasses import replace

import numpy as np
from loguru import logger

from src.data.dataset import Dataset, center
from src.estimators.base import EffectReport, outer_split
from src.forest.forest import CausalForest, ForestConfig, build_forest
from src.forest.inference import jackknife_batch
from src.utils.exceptions import pipeline_stage


class CausalForestEstimator:
    """Honest forest over centered features, evaluated on the same held-out half as Forest-PLS."""

    name = "causal-forest"

    def __init__(
        self,
        forest_config: ForestConfig | None = None,
        honest_fraction: float = 0.5,
        ci_level: float = 0.95,
    ):
        self.forest_config = forest_config or ForestConfig()
        self.honest_fraction = honest_fraction
        self.ci_level = ci_level
        self.forest: CausalForest | None = None

    def estimate(
        self, dataset: Dataset, seed: int, points: np.ndarray | None = None
    ) -> EffectReport:
        split = outer_split(dataset, seed, self.honest_fraction)
        centered, stats = center(dataset)

        with pipeline_stage("build_forest"):
            config = replace(self.forest_config.adapted_to(dataset.n), seed=seed)
            self.forest = build_forest(centered.features, dataset.outcome, dataset.policy, config)

        with pipeline_stage("predict"):
            if points is None:
                indices = split.estimation_indices
                evaluation = centered.features[indices]
            else:
                indices = None
                evaluation = stats.transform(points)
            estimates = jackknife_batch(self.forest, evaluation, ci_level=self.ci_level)

        logger.info(
            f"Causal forest: mean effect {estimates.point.mean():.4f} over {len(estimates)} points"
        )
        return EffectReport(estimates=estimates, evaluation_indices=indices)
