"""Simulation designs, density summaries and the replication runner."""

from src.simulation.density import (
    density_grid,
    kde,
    l1_distance,
    silverman_bandwidth,
    trapezoid_mass,
)
from src.simulation.designs import (
    Design,
    SimulatedDataset,
    SimulationSpec,
    effect_function,
    gen_appx_nbd,
    gen_appx_noconf,
    gen_constant,
    gen_iv,
    gen_rct,
    gen_single_index,
    replication_seed,
    simulate,
)
from src.simulation.runner import (
    Estimator,
    ReplicationSummary,
    make_estimator,
    run_convergence_study,
    run_replications,
)

__all__ = [
    "Design",
    "Estimator",
    "ReplicationSummary",
    "SimulatedDataset",
    "SimulationSpec",
    "density_grid",
    "effect_function",
    "gen_appx_nbd",
    "gen_appx_noconf",
    "gen_constant",
    "gen_iv",
    "gen_rct",
    "gen_single_index",
    "kde",
    "l1_distance",
    "make_estimator",
    "replication_seed",
    "run_convergence_study",
    "run_replications",
    "silverman_bandwidth",
    "simulate",
    "trapezoid_mass",
]
