"""Effect percentiles within vigintiles of a component's scores."""

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import pandas as pd
from loguru import logger

from src.utils.exceptions import InsufficientDataError, ShapeError

N_BINS = 20
PERCENTILES = (2.5, 25.0, 50.0, 75.0, 97.5)
MIN_POINTS = 40


def percentile_column(level: float) -> str:
    return f"p{level:g}"


@dataclass(frozen=True)
class VigintileReport:
    """One row per vigintile: score range, count and effect percentiles."""

    component_index: int
    rows: pd.DataFrame
    percentiles: tuple[float, ...] = PERCENTILES

    @property
    def spreads(self) -> pd.Series:
        return self.rows["spread"]

    def first_to_last_spread(self) -> tuple[float, float]:
        return float(self.spreads.iloc[0]), float(self.spreads.iloc[-1])

    def to_frame(self) -> pd.DataFrame:
        frame = self.rows.copy()
        frame.insert(0, "component", self.component_index)
        return frame


def assign_vigintiles(scores: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Bin index (0..19) of each score and the 21 bin edges.

    Edges are the type-7 20-quantiles of the scores; a score equal to an
    interior edge goes to the lower bin.
    """
    scores = np.asarray(scores, dtype=np.float64)
    edges = np.quantile(scores, np.linspace(0.0, 1.0, N_BINS + 1))
    return np.searchsorted(edges[1:-1], scores, side="left"), edges


def build_vigintile_report(
    scores: np.ndarray,
    effects: np.ndarray,
    component_index: int = 1,
    percentiles: Sequence[float] = PERCENTILES,
) -> VigintileReport:
    """
    Summarize predicted effects by vigintile of component scores.

    Args:
        scores: Component scores of the evaluation points
        effects: Predicted effects at the same points
        component_index: 1-based component number, carried onto the report
        percentiles: Effect percentiles computed per bin (linear interpolation)

    Returns:
        VigintileReport with spread = p97.5 - p2.5 and the same spread x 100
    """
    scores = np.asarray(scores, dtype=np.float64).ravel()
    effects = np.asarray(effects, dtype=np.float64).ravel()
    if scores.shape != effects.shape:
        raise ShapeError(f"{scores.size} scores but {effects.size} effects")
    if scores.size < MIN_POINTS:
        raise InsufficientDataError(
            f"Vigintile reports need at least {MIN_POINTS} points, got {scores.size}"
        )

    bins, edges = assign_vigintiles(scores)
    levels = tuple(float(p) for p in percentiles)
    rows = []
    sparse = []
    for b in range(N_BINS):
        members = effects[bins == b]
        if members.size < 2:
            sparse.append(b + 1)
        values = (
            np.percentile(members, levels, method="linear")
            if members.size
            else np.full(len(levels), np.nan)
        )
        row = {
            "vigintile": b + 1,
            "score_low": float(edges[b]),
            "score_high": float(edges[b + 1]),
            "count": int(members.size),
        }
        row.update({percentile_column(p): float(v) for p, v in zip(levels, values)})
        rows.append(row)
    if sparse:
        logger.warning(
            f"Component {component_index}: vigintile(s) {sparse} hold fewer than 2 points"
        )

    frame = pd.DataFrame(rows)
    upper, lower = percentile_column(max(levels)), percentile_column(min(levels))
    frame["spread"] = frame[upper] - frame[lower]
    frame["spread_pct"] = 100.0 * frame["spread"]
    return VigintileReport(component_index=component_index, rows=frame, percentiles=levels)
