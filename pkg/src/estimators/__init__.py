"""Policy-effect estimators shared by the simulation runner and the CLI."""

from src.estimators.base import EffectEstimator, EffectReport, outer_split
from src.estimators.causal_forest import CausalForestEstimator
from src.estimators.forest_pls import ForestPLSEstimator
from src.estimators.oracle import OracleEstimator

__all__ = [
    "CausalForestEstimator",
    "EffectEstimator",
    "EffectReport",
    "ForestPLSEstimator",
    "OracleEstimator",
    "outer_split",
]
