"""Shared protocol and result type of the policy-effect estimators."""

from dataclasses import dataclass
from typing import Protocol

import numpy as np

from src.data.dataset import Dataset, HonestSplit, split_indices
from src.forest.inference import EffectEstimates


@dataclass(frozen=True)
class EffectReport:
    """
    Effects estimated at a set of evaluation points.

    evaluation_indices are dataset rows when effects were evaluated on the
    held-out half, None for externally supplied points. scores holds the
    component coordinates of the evaluation points when the estimator has them.
    """

    estimates: EffectEstimates
    evaluation_indices: np.ndarray | None
    components: int | None = None
    scores: np.ndarray | None = None

    @property
    def effects(self) -> np.ndarray:
        return self.estimates.point


class EffectEstimator(Protocol):
    name: str

    def estimate(
        self, dataset: Dataset, seed: int, points: np.ndarray | None = None
    ) -> EffectReport: ...


def outer_split(dataset: Dataset, seed: int, fraction: float) -> HonestSplit:
    """Fitting/evaluation partition; depends only on the policy vector and the seed."""
    return split_indices(dataset.policy, (seed, 0), fraction=fraction)
