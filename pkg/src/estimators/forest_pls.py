"""Forest-PLS: causal forest grown on partial least squares target components."""

from dataclasses import replace

import numpy as np
from loguru import logger

from src.data.dataset import Dataset
from src.estimators.base import EffectReport, outer_split
from src.forest.forest import CausalForest, ForestConfig, build_forest
from src.forest.inference import jackknife_batch
from src.pls.nipals import PlsModel, fit_pls, project
from src.pls.selection import ComponentSelection, select_components_cv
from src.utils.exceptions import pipeline_stage


class ForestPLSEstimator:
    """
    Two-stage estimator: PLS components from the fitting half, then an honest
    forest over the component scores of the whole sample.

    Effects are reported at the evaluation half unless explicit points are given.
    """

    name = "forest-pls"

    def __init__(
        self,
        forest_config: ForestConfig | None = None,
        components: int = 0,
        max_components: int = 6,
        folds: int = 5,
        scale: bool = False,
        honest_fraction: float = 0.5,
        ci_level: float = 0.95,
    ):
        self.forest_config = forest_config or ForestConfig()
        self.components = components
        self.max_components = max_components
        self.folds = folds
        self.scale = scale
        self.honest_fraction = honest_fraction
        self.ci_level = ci_level

        # Filled by estimate()
        self.model: PlsModel | None = None
        self.selection: ComponentSelection | None = None
        self.forest: CausalForest | None = None

    def estimate(
        self, dataset: Dataset, seed: int, points: np.ndarray | None = None
    ) -> EffectReport:
        split = outer_split(dataset, seed, self.honest_fraction)
        fitting = dataset.subset(split.train_indices)

        with pipeline_stage("select_components"):
            if self.components:
                q = min(self.components, dataset.p)
                self.selection = None
            else:
                self.selection = select_components_cv(
                    fitting,
                    folds=self.folds,
                    max_q=min(self.max_components, dataset.p),
                    seed=seed,
                    scale=self.scale,
                )
                q = self.selection.selected

        with pipeline_stage("fit_pls"):
            self.model = fit_pls(fitting, q, scale=self.scale)
            scores = project(self.model, dataset.features)

        with pipeline_stage("build_forest"):
            config = replace(self.forest_config.adapted_to(dataset.n), seed=seed)
            self.forest = build_forest(scores, dataset.outcome, dataset.policy, config)

        with pipeline_stage("predict"):
            if points is None:
                indices = split.estimation_indices
                evaluation_scores = scores[indices]
            else:
                indices = None
                evaluation_scores = project(self.model, points)
            estimates = jackknife_batch(self.forest, evaluation_scores, ci_level=self.ci_level)

        logger.info(
            f"Forest-PLS: {self.model.n_components} component(s), "
            f"mean effect {estimates.point.mean():.4f} over {len(estimates)} points"
        )
        return EffectReport(
            estimates=estimates,
            evaluation_indices=indices,
            components=self.model.n_components,
            scores=evaluation_scores,
        )
