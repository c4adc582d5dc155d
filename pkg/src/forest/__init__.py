"""Honest causal trees and subsampled forests over component scores."""

from src.forest.forest import CausalForest, ForestConfig, build_forest, predict
from src.forest.inference import (
    EffectEstimate,
    EffectEstimates,
    JackknifeTerms,
    jackknife_batch,
    jackknife_terms,
    jackknife_variance,
)
from src.forest.serialization import load_forest, save_forest
from src.forest.tree import (
    CausalTree,
    SplitRule,
    TreeParams,
    audit_regularity,
    best_split,
    build_tree,
    leaf_effect,
)

__all__ = [
    "CausalForest",
    "CausalTree",
    "EffectEstimate",
    "EffectEstimates",
    "ForestConfig",
    "JackknifeTerms",
    "SplitRule",
    "TreeParams",
    "audit_regularity",
    "best_split",
    "build_forest",
    "build_tree",
    "jackknife_batch",
    "jackknife_terms",
    "jackknife_variance",
    "leaf_effect",
    "load_forest",
    "predict",
    "save_forest",
]
