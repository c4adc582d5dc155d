"""Implementations of the simulate, analyze and compare commands."""

from pathlib import Path

import numpy as np
import pandas as pd
from loguru import logger
from rich import box
from rich.console import Console
from rich.table import Table

from src.baselines import (
    ImportanceReport,
    average_importance,
    lasso_cv,
    lasso_fit,
    ols_fit,
    regression_tree_importance,
)
from src.data.loader import get_preset, load_csv, load_schema
from src.estimators import CausalForestEstimator, EffectReport, ForestPLSEstimator
from src.forest.forest import ForestConfig
from src.forest.serialization import save_forest
from src.models.schemas import RunConfig
from src.pls.interpretation import loading_report
from src.reporting.vigintiles import build_vigintile_report
from src.reporting.writers import (
    EFFECTS_FILE,
    LASSO_FILE,
    LOADINGS_FILE,
    RMSEP_FILE,
    VARIMP_FILE,
    effects_frame,
    vigintile_file,
    write_frame,
    write_summary,
)
from src.simulation.designs import Design, SimulationSpec, replication_seed, simulate
from src.simulation.runner import run_replications
from src.utils.exceptions import pipeline_stage

console = Console(stderr=True)

PENN_EXPECTED_COMPONENTS = 2


def forest_config_from(config: RunConfig) -> ForestConfig:
    return ForestConfig(
        n_trees=config.trees,
        beta=config.beta,
        alpha=config.alpha,
        k=config.k,
        pi=config.pi,
        min_arm=config.min_arm,
        honest_fraction=config.honest_fraction,
        seed=config.seed,
        n_jobs=config.threads,
    )


def _forest_pls(config: RunConfig, scale: bool = False) -> ForestPLSEstimator:
    return ForestPLSEstimator(
        forest_config_from(config),
        components=config.components,
        max_components=config.max_components,
        scale=scale,
        honest_fraction=config.honest_fraction,
        ci_level=config.ci_level,
    )


def _causal_forest(config: RunConfig) -> CausalForestEstimator:
    return CausalForestEstimator(
        forest_config_from(config),
        honest_fraction=config.honest_fraction,
        ci_level=config.ci_level,
    )


def cmd_simulate(config: RunConfig) -> list[Path]:
    """Run a replication study and write summary.json and moments.csv."""
    spec = SimulationSpec(Design(config.design), config.n, config.seed)
    console.print(
        f"[bold cyan]Simulating[/bold cyan] {config.design} n={config.n} "
        f"x {config.reps} replications with {config.estimator}"
    )
    with pipeline_stage("simulate"):
        summary = run_replications(
            spec,
            estimator=config.estimator,
            replications=config.reps,
            forest_config=forest_config_from(config),
            components=config.components,
            max_components=config.max_components,
            evaluation=config.evaluation,
            honest_fraction=config.honest_fraction,
            ci_level=config.ci_level,
        )
    paths = write_summary(summary.to_payload(), config.out)

    bias, se = summary.mean_bias()
    table = Table(show_header=True, header_style="bold cyan", box=box.ROUNDED)
    table.add_column("Design", style="bold white")
    table.add_column("n", justify="right")
    table.add_column("Estimator")
    table.add_column("Mean bias", justify="right")
    table.add_column("MC s.e.", justify="right")
    table.add_column("Mean L1", justify="right")
    mean_l1 = summary.mean_l1()
    table.add_row(
        config.design,
        str(config.n),
        config.estimator,
        f"{bias:+.4f}",
        f"{se:.4f}",
        "n/a" if mean_l1 is None else f"{mean_l1:.4f}",
    )
    console.print(table)
    if summary.binarized_policy:
        console.print("[yellow]Continuous policy was binarized at its sample median[/yellow]")
    return paths


def cmd_analyze(config: RunConfig) -> list[Path]:
    """Run the Forest-PLS pipeline on a dataset and write effect, vigintile and loading tables."""
    with pipeline_stage("ingest"):
        schema = get_preset(config.preset) if config.preset else load_schema(config.schema_path)
        dataset = load_csv(config.data, schema)
    scale = config.scale if config.scale is not None else config.preset == "penn"

    estimator = _forest_pls(config, scale=scale)
    report = estimator.estimate(dataset, config.seed)
    if config.preset == "penn" and report.components != PENN_EXPECTED_COMPONENTS:
        logger.warning(
            f"Cross-validation chose {report.components} components on the Penn data "
            f"(expected {PENN_EXPECTED_COMPONENTS})"
        )

    if config.estimator == "causal-forest":
        comparator = _causal_forest(config).estimate(dataset, config.seed)
        report = EffectReport(
            estimates=comparator.estimates,
            evaluation_indices=comparator.evaluation_indices,
            components=report.components,
            scores=report.scores,
        )

    out = config.out
    paths = [write_frame(effects_frame(report), out, EFFECTS_FILE)]

    with pipeline_stage("report"):
        vigintiles = [
            build_vigintile_report(report.scores[:, j], report.effects, component_index=j + 1)
            for j in range(report.scores.shape[1])
        ]
    for vigintile in vigintiles:
        paths.append(
            write_frame(vigintile.to_frame(), out, vigintile_file(vigintile.component_index))
        )

    loadings = loading_report(estimator.model, dataset)
    paths.append(write_frame(loadings.to_frame(), out, LOADINGS_FILE, index=True))
    if estimator.selection is not None:
        rmsep = pd.DataFrame(estimator.selection.as_rows())
        paths.append(write_frame(rmsep, out, RMSEP_FILE))
    if config.save_forest and estimator.forest is not None:
        paths.append(save_forest(estimator.forest, out / "forest.json"))

    table = Table(show_header=True, header_style="bold cyan", box=box.ROUNDED)
    table.add_column("Component", style="bold white")
    table.add_column("First-vigintile spread %", justify="right")
    table.add_column("Last-vigintile spread %", justify="right")
    for vigintile in vigintiles:
        first, last = vigintile.first_to_last_spread()
        table.add_row(str(vigintile.component_index), f"{100 * first:.1f}", f"{100 * last:.1f}")
    console.print(
        f"[bold]{dataset.n} units[/bold], {report.components} component(s), "
        f"{len(report.estimates)} evaluation points ({config.estimator})"
    )
    console.print(table)
    return paths


def _importance(
    report: EffectReport, features: np.ndarray, names: tuple[str, ...]
) -> ImportanceReport:
    return regression_tree_importance(
        features[report.evaluation_indices], report.effects, feature_names=names
    )


def cmd_compare(config: RunConfig) -> list[Path]:
    """Variable importance of both forests and LASSO coefficients on the same draws."""
    design = Design(config.design)
    importance: dict[str, list[ImportanceReport]] = {"forest-pls": [], "causal-forest": []}
    lasso_rows = []

    for r in range(config.reps):
        seed = replication_seed(config.seed, r)
        draw = simulate(SimulationSpec(design, config.n, seed))
        data = draw.dataset
        names = data.feature_names

        with pipeline_stage("compare"):
            for label, estimator in (
                ("forest-pls", _forest_pls(config)),
                ("causal-forest", _causal_forest(config)),
            ):
                report = estimator.estimate(data, seed)
                importance[label].append(_importance(report, data.features, names))

        with pipeline_stage("lasso"):
            _, cv_fit = lasso_cv(data.features, data.outcome, seed=seed, feature_names=names)
            fits = {
                "ols": ols_fit(data.features, data.outcome, feature_names=names),
                "lasso-cv": cv_fit,
                "lasso-fixed": lasso_fit(
                    data.features, data.outcome, config.lasso_lambda, feature_names=names
                ),
            }
        for label, fit in fits.items():
            frame = fit.to_frame()
            frame["method"] = label
            frame.insert(0, "replication", r)
            lasso_rows.append(frame)

    averaged = {label: average_importance(reports) for label, reports in importance.items()}
    varimp = pd.concat([report.to_frame(label) for label, report in averaged.items()])
    varimp["replications"] = config.reps

    out = config.out
    paths = [
        write_frame(varimp, out, VARIMP_FILE),
        write_frame(pd.concat(lasso_rows, ignore_index=True), out, LASSO_FILE),
    ]

    table = Table(show_header=True, header_style="bold cyan", box=box.ROUNDED)
    table.add_column("Feature", style="bold white")
    for label in averaged:
        table.add_column(label, justify="right")
    for j, name in enumerate(averaged["forest-pls"].feature_names):
        table.add_row(name, *(f"{report.shares[j]:.3f}" for report in averaged.values()))
    console.print(f"[bold]Variable importance[/bold] ({config.design}, n={config.n})")
    console.print(table)
    return paths
