"""
Check tests/fixtures/effect_moments.json against a brute-force simulation.

Draws 10^6 covariate rows per design and compares the sample mean and
variance of the true effects with the committed population values.
Pass --write to regenerate the file from the closed-form moments.
"""

import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

import numpy as np
from rich import box
from rich.console import Console
from rich.table import Table

from src.simulation.designs import Design, SimulationSpec, simulate

console = Console()

FIXTURE = Path(__file__).parent.parent / "tests" / "fixtures" / "effect_moments.json"

# Closed forms under X ~ N((-1, 1, 2, 0), I)
POPULATION = {
    "rct": {"mean": 2.0, "variance": 1.29},
    "iv": {"mean": -0.5, "variance": 0.25},
    "noconf": {"mean": -2.0, "variance": 6.0},
    "nbd": {"mean": -3.0, "variance": 9.0},
    "constant": {"mean": 1.0, "variance": 0.0},
}
NBD_POLICY_MEAN = 2.0


def main():
    parser = argparse.ArgumentParser(description="Monte Carlo check of the effect-moment fixture")
    parser.add_argument("--draws", type=int, default=1_000_000, help="Rows per design")
    parser.add_argument("--seed", type=int, default=20240601)
    parser.add_argument("--write", action="store_true", help="Rewrite the fixture file")
    args = parser.parse_args()

    table = Table(show_header=True, header_style="bold cyan", box=box.ROUNDED)
    table.add_column("Design", style="bold white")
    table.add_column("Mean", justify="right")
    table.add_column("MC mean", justify="right")
    table.add_column("Variance", justify="right")
    table.add_column("MC variance", justify="right")

    failures = 0
    for design in Design:
        draw = simulate(SimulationSpec(design, args.draws, args.seed))
        expected = POPULATION[design.value]
        mean, variance = draw.true_effects.mean(), draw.true_effects.var(ddof=1)
        tolerance = 5 * np.sqrt(expected["variance"] / args.draws) + 1e-12
        ok = abs(mean - expected["mean"]) <= tolerance and np.isclose(
            variance, expected["variance"], rtol=0.01, atol=1e-12
        )
        failures += not ok
        style = "green" if ok else "red"
        table.add_row(
            design.value,
            f"{expected['mean']:.4f}",
            f"[{style}]{mean:.4f}[/{style}]",
            f"{expected['variance']:.4f}",
            f"[{style}]{variance:.4f}[/{style}]",
        )
    console.print(table)

    if args.write:
        payload = {
            "description": (
                "Population mean and variance of the true policy effect under each simulation "
                "design. Values follow from the independent Gaussian covariates "
                "X1..X4 ~ N((-1, 1, 2, 0), I); scripts/build_oracle_fixtures.py checks them "
                "against 10^6-draw Monte Carlo estimates."
            ),
            "draws": args.draws,
            "designs": POPULATION,
            "nbd_policy_mean": NBD_POLICY_MEAN,
        }
        FIXTURE.write_text(json.dumps(payload, indent=2) + "\n")
        console.print(f"[green]Wrote[/green] {FIXTURE}")

    if failures:
        console.print(f"[bold red]{failures} design(s) disagree with the fixture[/bold red]")
        sys.exit(1)


if __name__ == "__main__":
    main()
