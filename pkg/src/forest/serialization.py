"""Versioned JSON artifacts for fitted forests."""

from pathlib import Path

import numpy as np
from loguru import logger
from pydantic import ValidationError

from src.forest.forest import CausalForest, ForestConfig
from src.forest.tree import CausalTree
from src.models.schemas import ForestArtifact, TreeArtifact
from src.utils.exceptions import DataError


def tree_to_artifact(tree: CausalTree) -> TreeArtifact:
    return TreeArtifact(
        seed=list(tree.seed),
        feature=tree.feature.tolist(),
        threshold=tree.threshold.tolist(),
        left=tree.left.tolist(),
        right=tree.right.tolist(),
        treated_mean=tree.treated_mean.tolist(),
        control_mean=tree.control_mean.tolist(),
        n_treated=tree.n_treated.tolist(),
        n_control=tree.n_control.tolist(),
        n_train=tree.n_train.tolist(),
        train_indices=tree.train_indices.tolist(),
        estimation_indices=tree.estimation_indices.tolist(),
    )


def tree_from_artifact(artifact: TreeArtifact, n_features: int) -> CausalTree:
    return CausalTree(
        feature=np.asarray(artifact.feature, dtype=np.int64),
        threshold=np.asarray(artifact.threshold, dtype=np.float64),
        left=np.asarray(artifact.left, dtype=np.int64),
        right=np.asarray(artifact.right, dtype=np.int64),
        treated_mean=np.asarray(artifact.treated_mean, dtype=np.float64),
        control_mean=np.asarray(artifact.control_mean, dtype=np.float64),
        n_treated=np.asarray(artifact.n_treated, dtype=np.int64),
        n_control=np.asarray(artifact.n_control, dtype=np.int64),
        n_train=np.asarray(artifact.n_train, dtype=np.int64),
        train_indices=np.asarray(artifact.train_indices, dtype=np.int64),
        estimation_indices=np.asarray(artifact.estimation_indices, dtype=np.int64),
        n_features=n_features,
        seed=tuple(artifact.seed),
    )


def save_forest(forest: CausalForest, path: Path | str) -> Path:
    """Write the forest as a format-version-1 JSON artifact."""
    path = Path(path)
    artifact = ForestArtifact(
        n_obs=forest.n_obs,
        n_features=forest.n_features,
        subsample_size=forest.subsample_size,
        master_seed=forest.master_seed,
        config=forest.config.as_dict(),
        subsamples=forest.subsamples.tolist(),
        trees=[tree_to_artifact(tree) for tree in forest.trees],
    )
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(artifact.model_dump_json())
    logger.info(f"Saved forest with {forest.n_trees} trees to {path}")
    return path


def load_forest(path: Path | str) -> CausalForest:
    """Read a forest artifact written by save_forest."""
    path = Path(path)
    try:
        artifact = ForestArtifact.model_validate_json(path.read_text())
    except (OSError, ValidationError) as e:
        raise DataError(f"Cannot load forest artifact {path}: {e}") from e

    return CausalForest(
        trees=tuple(tree_from_artifact(t, artifact.n_features) for t in artifact.trees),
        subsamples=np.asarray(artifact.subsamples, dtype=np.int64),
        n_obs=artifact.n_obs,
        config=ForestConfig(**artifact.config),
    )
