"""Oracle estimator returning the true effects, for validating the replication runner."""

from collections.abc import Callable

import numpy as np

from src.data.dataset import Dataset
from src.estimators.base import EffectReport, outer_split
from src.forest.inference import EffectEstimates


class OracleEstimator:
    name = "oracle"

    def __init__(
        self, effect: Callable[[np.ndarray], np.ndarray], honest_fraction: float = 0.5
    ):
        self.effect = effect
        self.honest_fraction = honest_fraction

    def estimate(
        self, dataset: Dataset, seed: int, points: np.ndarray | None = None
    ) -> EffectReport:
        if points is None:
            indices = outer_split(dataset, seed, self.honest_fraction).estimation_indices
            points = dataset.features[indices]
        else:
            indices = None
        effects = np.asarray(self.effect(points), dtype=np.float64)
        zeros = np.zeros_like(effects)
        estimates = EffectEstimates(
            point=effects,
            variance=zeros,
            ci_low=effects,
            ci_high=effects,
            clamped=zeros.astype(bool),
            ci_level=0.95,
        )
        return EffectReport(estimates=estimates, evaluation_indices=indices)
