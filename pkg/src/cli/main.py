"""
fpls command-line entry point.

    fpls simulate --design rct --n 500 --reps 50 --seed 1 --out results/
    fpls analyze --data penn_jae.dat --preset penn --out penn/
    fpls compare --design rct --n 5000 --reps 10 --out compare/

Exit codes: 0 success, 2 configuration error, 3 data error, 4 estimation error.
"""

import argparse
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any

import yaml
from loguru import logger
from pydantic import ValidationError
from rich.console import Console

from src.cli.commands import cmd_analyze, cmd_compare, cmd_simulate
from src.config.logging_config import configure_logging
from src.models.schemas import RunConfig
from src.utils.exceptions import ConfigurationError, ForestPlsError

console = Console(stderr=True)

COMMANDS: dict[str, Callable[[RunConfig], list[Path]]] = {
    "simulate": cmd_simulate,
    "analyze": cmd_analyze,
    "compare": cmd_compare,
}

# argparse dest -> RunConfig field
RENAMED = {"schema": "schema_path", "lam": "lasso_lambda"}
CLI_ONLY = {"command", "config", "log_level", "log_file"}


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="YAML file of run parameters")
    parser.add_argument("--seed", type=int, help="Master seed (default: FPLS_DEFAULT_SEED or 1)")
    parser.add_argument(
        "--out", type=Path, help="Output directory (default: FPLS_OUTPUT_DIR or output)"
    )
    parser.add_argument(
        "--estimator",
        choices=["forest-pls", "causal-forest"],
        help="Effect estimator (default: forest-pls)",
    )
    parser.add_argument(
        "--components", type=int, help="Number of target components (0 = five-fold CV)"
    )
    parser.add_argument(
        "--max-components", type=int, help="Largest component count tried by CV (default: 6)"
    )
    parser.add_argument("--trees", type=int, help="Number of trees (default: 1000)")
    parser.add_argument("--beta", type=float, help="Subsample exponent, s = n^beta (default: 0.8)")
    parser.add_argument("--alpha", type=float, help="Minimum child fraction (default: 0.2)")
    parser.add_argument("--k", type=int, help="Minimum leaf size (default: 10)")
    parser.add_argument(
        "--pi", type=float, help="Coordinate eligibility probability (default: 0.8)"
    )
    parser.add_argument("--min-arm", type=int, help="Minimum units per arm in a leaf (default: 3)")
    parser.add_argument(
        "--honest-fraction", type=float, help="Share of rows in the training half (default: 0.5)"
    )
    parser.add_argument("--ci-level", type=float, help="Confidence level (default: 0.95)")
    parser.add_argument("--threads", type=int, help="Forest workers (default: FPLS_THREADS)")
    parser.add_argument("--log-level", type=str, help="Log level (default: FPLS_LOG_LEVEL)")
    parser.add_argument("--log-file", type=str, help="Also log to this file")


def _add_simulation(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--design", choices=["rct", "iv", "noconf", "nbd", "constant"], help="Simulation design"
    )
    parser.add_argument("--n", type=int, help="Sample size (default: 500)")
    parser.add_argument("--reps", type=int, help="Replications (default: 50)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fpls", description="Forest-PLS policy effect estimation"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    simulate = subparsers.add_parser("simulate", help="Run a simulation study")
    _add_common(simulate)
    _add_simulation(simulate)
    simulate.add_argument(
        "--evaluation",
        choices=["estimation", "fresh"],
        help="Evaluate effects on the held-out half or a fresh draw (default: estimation)",
    )

    analyze = subparsers.add_parser("analyze", help="Analyze a dataset")
    _add_common(analyze)
    analyze.add_argument("--data", type=Path, help="CSV or whitespace-delimited data file")
    analyze.add_argument("--preset", choices=["penn"], help="Named ingestion preset")
    analyze.add_argument("--schema", type=Path, help="JSON ingestion schema")
    analyze.add_argument(
        "--scale",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="Standardize features before PLS (default: on for the Penn preset)",
    )
    analyze.add_argument(
        "--save-forest", action="store_true", default=None, help="Also write forest.json"
    )

    compare = subparsers.add_parser("compare", help="Compare estimators and baselines")
    _add_common(compare)
    _add_simulation(compare)
    compare.add_argument(
        "--lambda", dest="lam", type=float, help="Fixed LASSO penalty (default: 2.605)"
    )
    return parser


def load_config_file(path: Path) -> dict[str, Any]:
    """Read run parameters from YAML."""
    try:
        with open(path) as f:
            values = yaml.safe_load(f) or {}
    except (OSError, yaml.YAMLError) as e:
        raise ConfigurationError(f"Cannot read config file {path}: {e}") from e
    if not isinstance(values, dict):
        raise ConfigurationError(f"Config file {path} must hold a mapping")
    return values


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge YAML values with explicit CLI flags (flags win) into a RunConfig."""
    values = load_config_file(args.config) if args.config else {}
    for dest, value in vars(args).items():
        if dest in CLI_ONLY or value is None:
            continue
        values[RENAMED.get(dest, dest)] = value
    values["command"] = args.command
    try:
        return RunConfig(**values)
    except ValidationError as e:
        raise ConfigurationError(f"Invalid run configuration:\n{e}") from e


def run(argv: Sequence[str] | None = None) -> int:
    """Parse arguments, run the command and return its exit code."""
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level, args.log_file)
    try:
        config = resolve_config(args)
        paths = COMMANDS[config.command](config)
    except ForestPlsError as e:
        logger.error(str(e))
        console.print(f"[bold red]Error:[/bold red] {e}")
        return e.exit_code

    console.print(f"[green]Done[/green]: {len(paths)} file(s) written to {config.out}")
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
