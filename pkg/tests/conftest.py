"""Shared fixtures."""

import json
from pathlib import Path

import numpy as np
import pytest
from loguru import logger

from src.data.dataset import Dataset
from src.forest.forest import ForestConfig
from src.forest.tree import LEAF, CausalTree

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def rng():
    """Seeded generator for test data."""
    return np.random.default_rng(20240601)


def make_dataset(rng: np.random.Generator, n: int = 200, p: int = 4) -> Dataset:
    """Random linear dataset with a balanced binary policy."""
    X = rng.normal(size=(n, p))
    policy = np.tile([0.0, 1.0], n // 2 + 1)[:n]
    rng.shuffle(policy)
    y = X @ rng.normal(size=p) + policy * (1 + X[:, 0]) + rng.normal(size=n)
    return Dataset(
        features=X,
        outcome=y,
        policy=policy,
        feature_names=tuple(f"x{j + 1}" for j in range(p)),
    )


@pytest.fixture
def dataset(rng):
    """200 x 4 random dataset."""
    return make_dataset(rng)


@pytest.fixture
def small_forest_config():
    """Fast forest settings for unit tests."""
    return ForestConfig(n_trees=20, k=5, min_arm=2, seed=7, n_jobs=1)


@pytest.fixture(scope="session")
def effect_moments():
    """Population moments of each design's true effects."""
    return json.loads((FIXTURES / "effect_moments.json").read_text())["designs"]


@pytest.fixture
def warnings_log():
    """Collect loguru warning messages emitted during a test."""
    messages: list[str] = []
    handler = logger.add(messages.append, level="WARNING", format="{message}")
    yield messages
    logger.remove(handler)


@pytest.fixture
def stub_tree():
    """Factory for single-leaf trees with a fixed effect."""

    def build(effect: float, n_features: int = 1) -> CausalTree:
        return CausalTree(
            feature=np.array([LEAF]),
            threshold=np.zeros(1),
            left=np.array([LEAF]),
            right=np.array([LEAF]),
            treated_mean=np.array([effect]),
            control_mean=np.zeros(1),
            n_treated=np.array([3]),
            n_control=np.array([3]),
            n_train=np.array([6]),
            train_indices=np.arange(6),
            estimation_indices=np.arange(6, 12),
            n_features=n_features,
        )

    return build
