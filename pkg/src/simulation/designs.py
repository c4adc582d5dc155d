"""
Data-generating processes for the simulation studies.

Covariates X1..X4 are independent Gaussians with means (-1, 1, 2, 0) and unit
variances. Designs with a continuous policy intensity (IV, NBD) keep it for
outcome generation and hand the estimators a median-split binary policy.
"""

from collections.abc import Callable, Sequence
from dataclasses import dataclass
from enum import Enum

import numpy as np
from loguru import logger

from src.data.dataset import Dataset
from src.utils.exceptions import ConfigurationError

COVARIATE_MEANS = np.array([-1.0, 1.0, 2.0, 0.0])
FEATURE_NAMES = ("X1", "X2", "X3", "X4")
MIN_SIZE = 20


class Design(Enum):
    """Simulation designs."""

    RCT = "rct"  # randomized trial, interaction effect
    IV = "iv"  # endogenous policy with withheld instruments
    NOCONF = "noconf"  # randomized trial, effect X3 * X1
    NBD = "nbd"  # policy driven by covariates
    CONSTANT = "constant"  # randomized trial, effect 1


@dataclass(frozen=True)
class SimulationSpec:
    """Design, sample size and seed of one simulated draw."""

    design: Design
    n: int
    seed: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "design", Design(self.design))
        if self.n < MIN_SIZE:
            raise ConfigurationError(f"Simulations need n >= {MIN_SIZE}, got {self.n}")


@dataclass(frozen=True)
class SimulatedDataset:
    """Estimation dataset plus the true per-unit policy effects."""

    dataset: Dataset
    true_effects: np.ndarray
    spec: SimulationSpec
    raw_policy: np.ndarray  # continuous intensity for IV/NBD, else the binary policy
    binarized: bool = False

    def __post_init__(self) -> None:
        self.true_effects.setflags(write=False)
        self.raw_policy.setflags(write=False)


def _rct_effect(X: np.ndarray) -> np.ndarray:
    return X[:, 2] + 0.1 * X[:, 3] + 0.2 * X[:, 2] * X[:, 3]


def _iv_effect(X: np.ndarray) -> np.ndarray:
    return 0.5 * X[:, 0]


def _noconf_effect(X: np.ndarray) -> np.ndarray:
    return X[:, 2] * X[:, 0]


def _nbd_effect(X: np.ndarray) -> np.ndarray:
    return 3.0 * X[:, 0]


def _constant_effect(X: np.ndarray) -> np.ndarray:
    return np.ones(X.shape[0])


EFFECTS: dict[Design, Callable[[np.ndarray], np.ndarray]] = {
    Design.RCT: _rct_effect,
    Design.IV: _iv_effect,
    Design.NOCONF: _noconf_effect,
    Design.NBD: _nbd_effect,
    Design.CONSTANT: _constant_effect,
}


def effect_function(design: Design | str) -> Callable[[np.ndarray], np.ndarray]:
    """True policy effect as a function of the covariate matrix."""
    return EFFECTS[Design(design)]


def _covariates(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.normal(loc=COVARIATE_MEANS, scale=1.0, size=(n, 4))


def binarize_at_median(intensity: np.ndarray) -> np.ndarray:
    """1 where the intensity exceeds its sample median, else 0."""
    return (intensity > np.median(intensity)).astype(np.float64)


def _package(
    spec: SimulationSpec,
    X: np.ndarray,
    outcome: np.ndarray,
    policy: np.ndarray,
    raw_policy: np.ndarray,
    binarized: bool,
) -> SimulatedDataset:
    dataset = Dataset(features=X, outcome=outcome, policy=policy, feature_names=FEATURE_NAMES)
    return SimulatedDataset(
        dataset=dataset,
        true_effects=effect_function(spec.design)(dataset.features),
        spec=spec,
        raw_policy=np.asarray(raw_policy, dtype=np.float64),
        binarized=binarized,
    )


def gen_rct(n: int, seed: int) -> SimulatedDataset:
    """Randomized trial: Y = 100 X1 + 100 X2 + P (X3 + 0.1 X4 + 0.2 X3 X4) + e."""
    spec = SimulationSpec(Design.RCT, n, seed)
    rng = np.random.default_rng(seed)
    X = _covariates(rng, n)
    P = rng.binomial(1, 0.5, size=n).astype(np.float64)
    Y = 100 * X[:, 0] + 100 * X[:, 1] + P * _rct_effect(X) + rng.normal(size=n)
    return _package(spec, X, Y, P, P, binarized=False)


def gen_iv(n: int, seed: int) -> SimulatedDataset:
    """
    Endogenous policy: P = Z1 - Z2 + 0.5 U + e1, Y = 0.5 P X1 - 3 U + e2.

    The instruments Z1, Z2 (independent standard normals) and the latent U are
    not part of the returned dataset.
    """
    spec = SimulationSpec(Design.IV, n, seed)
    rng = np.random.default_rng(seed)
    X = _covariates(rng, n)
    U = rng.normal(size=n)
    Z = rng.normal(size=(n, 2))
    P = Z[:, 0] - Z[:, 1] + 0.5 * U + rng.normal(size=n)
    Y = 0.5 * P * X[:, 0] - 3 * U + rng.normal(size=n)
    logger.warning("IV design: continuous policy binarized at its sample median")
    return _package(spec, X, Y, binarize_at_median(P), P, binarized=True)


def gen_appx_noconf(n: int, seed: int) -> SimulatedDataset:
    """Randomized trial with effect X3 * X1."""
    spec = SimulationSpec(Design.NOCONF, n, seed)
    rng = np.random.default_rng(seed)
    X = _covariates(rng, n)
    P = rng.binomial(1, 0.5, size=n).astype(np.float64)
    Y = 100 * X[:, 0] + 100 * X[:, 1] + P * _noconf_effect(X) + rng.normal(size=n)
    return _package(spec, X, Y, P, P, binarized=False)


def gen_appx_nbd(n: int, seed: int) -> SimulatedDataset:
    """Covariate-driven policy: D = X1 - X2 + 2 X3 + e, Y = 100 (X1 + X2 - X3) + 3 D X1 + e."""
    spec = SimulationSpec(Design.NBD, n, seed)
    rng = np.random.default_rng(seed)
    X = _covariates(rng, n)
    D = X[:, 0] - X[:, 1] + 2 * X[:, 2] + rng.normal(size=n)
    Y = 100 * X[:, 0] + 100 * X[:, 1] - 100 * X[:, 2] + 3 * D * X[:, 0] + rng.normal(size=n)
    logger.warning("NBD design: continuous policy binarized at its sample median")
    return _package(spec, X, Y, binarize_at_median(D), D, binarized=True)


def gen_constant(n: int, seed: int) -> SimulatedDataset:
    """Randomized trial with a constant unit effect: Y = X1 + X2 + P + e."""
    spec = SimulationSpec(Design.CONSTANT, n, seed)
    rng = np.random.default_rng(seed)
    X = _covariates(rng, n)
    P = rng.binomial(1, 0.5, size=n).astype(np.float64)
    Y = X[:, 0] + X[:, 1] + P + rng.normal(size=n)
    return _package(spec, X, Y, P, P, binarized=False)


GENERATORS: dict[Design, Callable[[int, int], SimulatedDataset]] = {
    Design.RCT: gen_rct,
    Design.IV: gen_iv,
    Design.NOCONF: gen_appx_noconf,
    Design.NBD: gen_appx_nbd,
    Design.CONSTANT: gen_constant,
}


def simulate(spec: SimulationSpec) -> SimulatedDataset:
    """Draw the dataset described by spec."""
    return GENERATORS[spec.design](spec.n, spec.seed)


def replication_seed(seed: int, replication: int) -> int:
    """Integer seed of replication r, derived from the run seed."""
    return int(np.random.SeedSequence([seed, replication]).generate_state(1)[0])


def gen_single_index(
    n: int,
    seed: int,
    coefficients: Sequence[float],
    intercept: float = 0.0,
    noise: float = 1.0,
) -> Dataset:
    """
    Single-index regression y = (b0 + X b)^3 + noise * e with X ~ N(0, I).

    The policy column is all zeros; only features and outcome are meaningful.
    """
    b = np.asarray(coefficients, dtype=np.float64)
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, b.size))
    y = (intercept + X @ b) ** 3 + noise * rng.normal(size=n)
    return Dataset(
        features=X,
        outcome=y,
        policy=np.zeros(n),
        feature_names=tuple(f"X{j + 1}" for j in range(b.size)),
    )
