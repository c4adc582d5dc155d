"""
Subsampled honest causal forest.

Each tree is grown on its own size-s subsample drawn without replacement,
with an honest split inside the subsample. Per-tree randomness derives from
(master_seed, tree_index, attempt) only, so forests are identical whatever
the number of workers.
"""

from dataclasses import asdict, dataclass, field, replace
from math import ceil

import numpy as np
from joblib import Parallel, delayed
from loguru import logger
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from src.config.settings import settings
from src.data.dataset import split_indices
from src.forest.tree import CausalTree, TreeParams, build_tree
from src.utils.exceptions import (
    ConfigurationError,
    InsufficientDataError,
    ShapeError,
    SplitInfeasibleError,
    TreeDegenerateError,
)

SMALL_SAMPLE = 100


@dataclass(frozen=True)
class ForestConfig:
    """Forest hyperparameters."""

    n_trees: int = 1000
    beta: float = 0.8
    alpha: float = 0.2
    k: int = 10
    pi: float = 0.8
    min_arm: int = 3
    honest_fraction: float = 0.5
    seed: int = 1
    n_jobs: int | None = None  # None: FPLS_THREADS
    subsample_size: int | None = None  # overrides ceil(n ** beta)
    max_retries: int = 10

    def __post_init__(self) -> None:
        if self.n_trees < 1:
            raise ConfigurationError(f"n_trees must be positive, got {self.n_trees}")
        if not 0.0 < self.beta < 1.0:
            raise ConfigurationError(f"beta must lie in (0, 1), got {self.beta}")
        if not 0.0 < self.honest_fraction < 1.0:
            raise ConfigurationError(
                f"honest_fraction must lie in (0, 1), got {self.honest_fraction}"
            )
        if self.max_retries < 1:
            raise ConfigurationError(f"max_retries must be positive, got {self.max_retries}")
        self.tree_params  # validates alpha, k, pi, min_arm

    @property
    def tree_params(self) -> TreeParams:
        return TreeParams(alpha=self.alpha, k=self.k, pi=self.pi, min_arm=self.min_arm)

    def resolve_subsample_size(self, n: int) -> int:
        if self.subsample_size is not None:
            if not 4 <= self.subsample_size <= n:
                raise ConfigurationError(
                    f"subsample_size must lie in [4, {n}], got {self.subsample_size}"
                )
            return self.subsample_size
        return min(ceil(n**self.beta), n - 1)

    def adapted_to(self, n: int) -> "ForestConfig":
        """Shrink k and min_arm for samples below 100 observations."""
        if n >= SMALL_SAMPLE or (self.k <= 5 and self.min_arm <= 2):
            return self
        logger.info(f"n={n} < {SMALL_SAMPLE}: using k=5, min_arm=2")
        return replace(self, k=min(self.k, 5), min_arm=min(self.min_arm, 2))

    def as_dict(self) -> dict[str, float | int | None]:
        return asdict(self)


@dataclass(frozen=True)
class CausalForest:
    """Fitted forest: trees, their subsamples (rows of the full sample) and the config."""

    trees: tuple[CausalTree, ...]
    subsamples: np.ndarray  # B x s, sorted row indices
    n_obs: int
    config: ForestConfig
    _inclusion: np.ndarray | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        self.subsamples.setflags(write=False)

    @property
    def n_trees(self) -> int:
        return len(self.trees)

    @property
    def subsample_size(self) -> int:
        return int(self.subsamples.shape[1])

    @property
    def master_seed(self) -> int:
        return self.config.seed

    @property
    def n_features(self) -> int:
        return self.trees[0].n_features

    @property
    def inclusion_counts(self) -> np.ndarray:
        """N_ig: 1 if observation i is in tree g's subsample (n x B)."""
        if self._inclusion is None:
            counts = np.zeros((self.n_obs, self.n_trees), dtype=np.int8)
            counts[self.subsamples, np.arange(self.n_trees)[:, None]] = 1
            counts.setflags(write=False)
            object.__setattr__(self, "_inclusion", counts)
        return self._inclusion

    def tree_predictions(self, points: np.ndarray) -> np.ndarray:
        """Per-tree leaf effects at each point (B x m)."""
        X = np.atleast_2d(np.asarray(points, dtype=np.float64))
        if X.shape[1] != self.n_features:
            raise ShapeError(f"Forest expects {self.n_features} coordinates, got {X.shape[1]}")
        return np.vstack([tree.predict(X) for tree in self.trees])


def _grow_tree(
    components: np.ndarray,
    outcomes: np.ndarray,
    policy: np.ndarray,
    tree_index: int,
    subsample_size: int,
    config: ForestConfig,
) -> tuple[np.ndarray, CausalTree]:
    """Grow tree `tree_index`, redrawing its subsample on degenerate draws."""
    n = components.shape[0]
    params = config.tree_params
    retrying = Retrying(
        stop=stop_after_attempt(config.max_retries),
        retry=retry_if_exception_type((TreeDegenerateError, SplitInfeasibleError)),
        reraise=True,
    )
    for attempt in retrying:
        with attempt:
            number = attempt.retry_state.attempt_number - 1
            if number:
                logger.debug(f"Tree {tree_index}: retry {number} with a fresh subsample")
            rng = np.random.default_rng([config.seed, tree_index, number, 0])
            subsample = np.sort(rng.choice(n, size=subsample_size, replace=False))
            honest = split_indices(policy[subsample], rng, fraction=config.honest_fraction)
            tree = build_tree(
                components[subsample],
                outcomes[subsample],
                policy[subsample],
                honest,
                params,
                seed=(config.seed, tree_index, number, 1),
            )
    return subsample, tree


def build_forest(
    components: np.ndarray,
    outcomes: np.ndarray,
    policy: np.ndarray,
    config: ForestConfig | None = None,
) -> CausalForest:
    """
    Grow B honest causal trees on independent subsamples.

    Args:
        components: Component scores (n x q)
        outcomes: Outcomes (length n)
        policy: Binary policy (length n)
        config: Forest hyperparameters (defaults if omitted)

    Returns:
        CausalForest with trees in tree-index order

    Raises:
        InsufficientDataError: If n < 4k
        TreeDegenerateError: If a tree stays degenerate after max_retries subsamples
    """
    config = config or ForestConfig()
    C = np.atleast_2d(np.asarray(components, dtype=np.float64))
    y = np.asarray(outcomes, dtype=np.float64)
    d = np.asarray(policy, dtype=np.int64)
    n = C.shape[0]
    if y.shape[0] != n or d.shape[0] != n:
        raise ShapeError(f"components have {n} rows, outcomes {y.shape[0]}, policy {d.shape[0]}")
    if n < 4 * config.k:
        raise InsufficientDataError(f"Forest needs n >= 4k = {4 * config.k}, got {n}")

    s = config.resolve_subsample_size(n)
    n_jobs = config.n_jobs or settings.threads
    logger.info(
        f"Growing {config.n_trees} trees on subsamples of {s}/{n} "
        f"({C.shape[1]} coordinates, {n_jobs} worker(s))"
    )

    results = Parallel(n_jobs=n_jobs, prefer="processes")(
        delayed(_grow_tree)(C, y, d, g, s, config) for g in range(config.n_trees)
    )
    subsamples = np.vstack([subsample for subsample, _ in results])
    trees = tuple(tree for _, tree in results)

    leaves = np.array([tree.n_leaves for tree in trees])
    logger.info(f"Forest grown: {leaves.mean():.1f} leaves per tree on average")
    return CausalForest(trees=trees, subsamples=subsamples, n_obs=n, config=config)


def predict(forest: CausalForest, points: np.ndarray) -> np.ndarray | float:
    """Mean leaf effect over trees; a float for a single 1-D point."""
    values = forest.tree_predictions(points).mean(axis=0)
    return float(values[0]) if np.ndim(points) == 1 else values
