"""CSV and JSON writers for command outputs."""

from pathlib import Path

import numpy as np
import pandas as pd
from loguru import logger

from src.estimators.base import EffectReport
from src.models.schemas import ReplicationSummaryPayload

SUMMARY_FILE = "summary.json"
MOMENTS_FILE = "moments.csv"
EFFECTS_FILE = "effects.csv"
LOADINGS_FILE = "loadings.csv"
VARIMP_FILE = "varimp.csv"
LASSO_FILE = "lasso.csv"
RMSEP_FILE = "rmsep.csv"


def vigintile_file(component: int) -> str:
    return f"vigintiles_c{component}.csv"


def write_frame(frame: pd.DataFrame, out_dir: Path, name: str, index: bool = False) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    frame.to_csv(path, index=index)
    logger.info(f"Wrote {path} ({len(frame)} rows)")
    return path


def write_summary(payload: ReplicationSummaryPayload, out_dir: Path) -> list[Path]:
    """summary.json plus the flat per-replication moments table."""
    out_dir.mkdir(parents=True, exist_ok=True)
    summary_path = out_dir / SUMMARY_FILE
    summary_path.write_text(payload.model_dump_json(indent=2))
    logger.info(f"Wrote {summary_path}")

    moments = pd.DataFrame([row.model_dump() for row in payload.moments])
    return [summary_path, write_frame(moments, out_dir, MOMENTS_FILE)]


def effects_frame(report: EffectReport) -> pd.DataFrame:
    """point, score1..scoreq, effect, variance, ci_low, ci_high."""
    n_points = len(report.estimates)
    points = (
        report.evaluation_indices
        if report.evaluation_indices is not None
        else np.arange(n_points)
    )
    frame = pd.DataFrame({"point": np.asarray(points, dtype=np.int64)})
    if report.scores is not None:
        for j in range(report.scores.shape[1]):
            frame[f"score{j + 1}"] = report.scores[:, j]
    return pd.concat([frame, report.estimates.to_frame()], axis=1)
