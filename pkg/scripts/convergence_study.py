"""
Mean L1 distance between estimated and true effect densities as n grows.

    python scripts/convergence_study.py --design rct --reps 10
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

from rich import box
from rich.console import Console
from rich.table import Table

from src.config.logging_config import configure_logging
from src.forest.forest import ForestConfig
from src.simulation.runner import run_convergence_study

console = Console()


def main():
    parser = argparse.ArgumentParser(description="Density convergence study")
    parser.add_argument("--design", default="rct", choices=["rct", "iv", "noconf", "nbd"])
    parser.add_argument("--sizes", type=int, nargs="+", default=[500, 1000, 2000, 5000, 10_000])
    parser.add_argument("--reps", type=int, default=10)
    parser.add_argument("--trees", type=int, default=500)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--estimator", default="forest-pls", choices=["forest-pls", "causal-forest"])
    args = parser.parse_args()

    configure_logging("WARNING")
    console.print(
        f"[bold cyan]Convergence study[/bold cyan]: {args.design}, {args.reps} replications "
        f"per size, {args.trees} trees"
    )
    results = run_convergence_study(
        args.design,
        sizes=args.sizes,
        replications=args.reps,
        seed=args.seed,
        estimator=args.estimator,
        forest_config=ForestConfig(n_trees=args.trees, seed=args.seed),
    )

    table = Table(show_header=True, header_style="bold cyan", box=box.ROUNDED)
    table.add_column("n", justify="right", style="bold white")
    table.add_column("Mean L1 distance", justify="right")
    for n, distance in results:
        table.add_row(f"{n:,}", "n/a" if distance is None else f"{distance:.4f}")
    console.print(table)


if __name__ == "__main__":
    main()
