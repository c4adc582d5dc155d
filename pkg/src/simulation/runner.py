"""
Replication runner for the simulation studies.

Each replication draws a dataset from its own derived seed, estimates effects
with the chosen estimator and records moments of the true and estimated
effects. Densities of both are then computed on one grid shared by every
replication and averaged.
"""

from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum
from typing import Literal

import numpy as np
from loguru import logger

from src.estimators import (
    CausalForestEstimator,
    EffectEstimator,
    ForestPLSEstimator,
    OracleEstimator,
)
from src.forest.forest import ForestConfig
from src.models.schemas import MomentRow, ReplicationSummaryPayload
from src.simulation.density import density_grid, kde, l1_distance
from src.simulation.designs import (
    Design,
    SimulationSpec,
    effect_function,
    replication_seed,
    simulate,
)
from src.utils.exceptions import ForestPlsError, PointMassError, ReplicationError

Evaluation = Literal["estimation", "fresh"]


class Estimator(Enum):
    """Estimators the runner can drive."""

    FOREST_PLS = "forest-pls"
    CAUSAL_FOREST = "causal-forest"
    ORACLE = "oracle"


def make_estimator(
    kind: Estimator | str,
    design: Design,
    forest_config: ForestConfig | None = None,
    components: int = 0,
    max_components: int = 6,
    honest_fraction: float = 0.5,
    ci_level: float = 0.95,
) -> EffectEstimator:
    kind = Estimator(kind)
    if kind is Estimator.FOREST_PLS:
        return ForestPLSEstimator(
            forest_config,
            components=components,
            max_components=max_components,
            honest_fraction=honest_fraction,
            ci_level=ci_level,
        )
    if kind is Estimator.CAUSAL_FOREST:
        return CausalForestEstimator(
            forest_config, honest_fraction=honest_fraction, ci_level=ci_level
        )
    return OracleEstimator(effect_function(design), honest_fraction=honest_fraction)


@dataclass
class ReplicationSummary:
    """Averaged densities and per-replication moments of a simulation run."""

    design: Design
    n: int
    estimator: str
    grid: np.ndarray
    mean_density_true: np.ndarray
    mean_density_estimated: np.ndarray
    moments: list[MomentRow] = field(default_factory=list)
    binarized_policy: bool = False

    @property
    def replications(self) -> int:
        return len(self.moments)

    @property
    def has_densities(self) -> bool:
        return self.grid.size > 0

    def density_difference(self) -> np.ndarray:
        """Estimated minus true mean density on the grid."""
        return self.mean_density_estimated - self.mean_density_true

    def mean_bias(self) -> tuple[float, float]:
        """Average of mean(estimated) - mean(true) and its Monte Carlo standard error."""
        bias = np.array([row.mean_est - row.mean_true for row in self.moments])
        se = bias.std(ddof=1) / np.sqrt(bias.size) if bias.size > 1 else float("nan")
        return float(bias.mean()), float(se)

    def mean_l1(self) -> float | None:
        distances = [row.l1_distance for row in self.moments if row.l1_distance is not None]
        return float(np.mean(distances)) if distances else None

    def to_payload(self) -> ReplicationSummaryPayload:
        return ReplicationSummaryPayload(
            design=self.design.value,
            n=self.n,
            estimator=self.estimator,
            replications=self.replications,
            binarized_policy=self.binarized_policy,
            grid=self.grid.tolist(),
            density_true=self.mean_density_true.tolist(),
            density_est=self.mean_density_estimated.tolist(),
            density_diff=self.density_difference().tolist(),
            moments=self.moments,
        )


def run_replications(
    spec: SimulationSpec,
    estimator: Estimator | str = Estimator.FOREST_PLS,
    replications: int = 50,
    forest_config: ForestConfig | None = None,
    components: int = 0,
    max_components: int = 6,
    evaluation: Evaluation = "estimation",
    honest_fraction: float = 0.5,
    ci_level: float = 0.95,
) -> ReplicationSummary:
    """
    Run a simulation study.

    Args:
        spec: Design, sample size and run seed (replication seeds derive from it)
        estimator: Which estimator to fit
        replications: Number of independent draws
        forest_config: Forest hyperparameters
        components: Fixed component count (0 = cross-validated per replication)
        max_components: Largest component count tried by cross-validation
        evaluation: Evaluate effects on the held-out half ("estimation") or on a
            fresh draw of the same size ("fresh")
        honest_fraction: Share of rows used to fit the components
        ci_level: Interval level of the jackknife estimates

    Returns:
        ReplicationSummary

    Raises:
        ReplicationError: If a replication fails; carries the failing seed
    """
    kind = Estimator(estimator)
    fitted = make_estimator(
        kind,
        spec.design,
        forest_config=forest_config,
        components=components,
        max_components=max_components,
        honest_fraction=honest_fraction,
        ci_level=ci_level,
    )

    seeds = [replication_seed(spec.seed, r) for r in range(replications)]
    truths: list[np.ndarray] = []
    estimates: list[np.ndarray] = []
    selected: list[int | None] = []
    binarized = False
    for r, seed in enumerate(seeds):
        try:
            draw = simulate(SimulationSpec(spec.design, spec.n, seed))
            binarized = binarized or draw.binarized
            if evaluation == "fresh":
                fresh = simulate(SimulationSpec(spec.design, spec.n, replication_seed(seed, 1)))
                report = fitted.estimate(draw.dataset, seed, points=fresh.dataset.features)
                truth = fresh.true_effects
            else:
                report = fitted.estimate(draw.dataset, seed)
                truth = draw.true_effects[report.evaluation_indices]
        except ForestPlsError as e:
            raise ReplicationError(str(e), seed=seed, replication=r) from e

        truths.append(np.asarray(truth))
        estimates.append(report.effects)
        selected.append(report.components)
        logger.info(
            f"Replication {r + 1}/{replications} (seed {seed}): mean true {truth.mean():.4f}, "
            f"mean estimated {report.effects.mean():.4f}"
        )

    try:
        grid = density_grid(truths + estimates)
        true_densities = [kde(t, grid) for t in truths]
        est_densities = [kde(e, grid) for e in estimates]
    except PointMassError as e:
        logger.warning(f"Densities omitted: {e}")
        grid = np.array([])
        true_densities = est_densities = []

    moments = [
        MomentRow(
            replication=r,
            seed=seeds[r],
            components=selected[r],
            mean_true=float(truths[r].mean()),
            var_true=float(truths[r].var(ddof=1)),
            mean_est=float(estimates[r].mean()),
            var_est=float(estimates[r].var(ddof=1)),
            l1_distance=(
                l1_distance(est_densities[r], true_densities[r], grid) if grid.size else None
            ),
        )
        for r in range(replications)
    ]

    summary = ReplicationSummary(
        design=spec.design,
        n=spec.n,
        estimator=kind.value,
        grid=grid,
        mean_density_true=np.mean(true_densities, axis=0) if grid.size else np.array([]),
        mean_density_estimated=np.mean(est_densities, axis=0) if grid.size else np.array([]),
        moments=moments,
        binarized_policy=binarized,
    )
    bias, se = summary.mean_bias()
    logger.info(
        f"{kind.value} on {spec.design.value} n={spec.n}: mean bias {bias:.4f} (se {se:.4f})"
    )
    return summary


def run_convergence_study(
    design: Design | str,
    sizes: Sequence[int] = (500, 1000, 2000, 5000, 10_000),
    replications: int = 10,
    seed: int = 1,
    estimator: Estimator | str = Estimator.FOREST_PLS,
    forest_config: ForestConfig | None = None,
    components: int = 0,
) -> list[tuple[int, float | None]]:
    """Mean L1 distance between estimated and true effect densities per sample size."""
    results = []
    for n in sizes:
        summary = run_replications(
            SimulationSpec(Design(design), n, seed),
            estimator=estimator,
            replications=replications,
            forest_config=forest_config,
            components=components,
        )
        results.append((n, summary.mean_l1()))
        logger.info(f"Convergence study n={n}: mean L1 distance {summary.mean_l1()}")
    return results
