"""CSV ingestion into validated Datasets."""

from pathlib import Path

import numpy as np
import pandas as pd
from loguru import logger

from src.config.presets import PRESETS
from src.data.dataset import Dataset
from src.models.schemas import IngestionSchema
from src.utils.exceptions import (
    ConfigurationError,
    DataError,
    EmptyDataError,
    ParseError,
    SchemaError,
)


def load_schema(path: str | Path) -> IngestionSchema:
    """Read an ingestion schema from a JSON file."""
    try:
        return IngestionSchema.model_validate_json(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise ConfigurationError(f"Schema file not found: {path}") from e
    except ValueError as e:
        raise ConfigurationError(f"Invalid schema file {path}: {e}") from e


def get_preset(name: str) -> IngestionSchema:
    """Look up a named ingestion preset."""
    try:
        return PRESETS[name]
    except KeyError as e:
        raise ConfigurationError(
            f"Unknown preset '{name}' (available: {', '.join(sorted(PRESETS))})"
        ) from e


def _resolve_delimiter(path: Path, schema: IngestionSchema) -> str:
    if schema.delimiter is None:
        return ","
    # A comma in the header means the file was converted to CSV.
    try:
        with path.open(encoding="utf-8") as f:
            header = f.readline()
    except (OSError, UnicodeDecodeError) as e:
        raise DataError(f"Failed to read {path}: {e}") from e
    return "," if "," in header else schema.delimiter


def _to_numeric(frame: pd.DataFrame, columns: list[str]) -> pd.DataFrame:
    """
    Parse string cells to floats, failing on the first bad or non-finite cell.

    The frame index must still be the 0-based data-line number from read_csv,
    so errors point at file lines even after rows were filtered out.
    """
    parsed = {}
    for column in columns:
        # Short rows leave NaN in their trailing cells
        raw = frame[column].fillna("").astype(str).str.strip()
        values = pd.to_numeric(raw, errors="coerce")
        bad = values.isna() | ~np.isfinite(values.to_numpy(dtype=np.float64, na_value=np.nan))
        if bad.any():
            position = int(np.flatnonzero(bad.to_numpy())[0])
            # +2: one for the header row, one for 1-based numbering
            raise ParseError(
                f"Cannot parse '{raw.iloc[position]}' as a finite number",
                row=int(frame.index[position]) + 2,
                column=column,
            )
        parsed[column] = values.astype(np.float64)
    return pd.DataFrame(parsed, index=frame.index)


def load_csv(path: str | Path, schema: IngestionSchema) -> Dataset:
    """
    Load a delimited file into a Dataset according to a column-role schema.

    Args:
        path: CSV (or whitespace-delimited) file with a header row
        schema: Outcome, policy, feature and filter roles

    Returns:
        Validated Dataset; constant feature columns are dropped and recorded

    Raises:
        SchemaError: If a named column is missing
        ParseError: If a used cell is not a finite number
        EmptyDataError: If no rows remain after filtering
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"Data file not found: {path}")

    sep = _resolve_delimiter(path, schema)
    try:
        frame = pd.read_csv(
            path,
            sep=sep,
            dtype=str,
            keep_default_na=False,
            engine="python" if len(sep) > 1 else "c",
        )
    except pd.errors.EmptyDataError as e:
        raise EmptyDataError(f"{path.name} is empty") from e
    except (pd.errors.ParserError, UnicodeDecodeError) as e:
        raise DataError(f"Failed to read {path}: {e}") from e
    frame.columns = [str(c).strip() for c in frame.columns]

    role_columns = [schema.outcome, schema.policy]
    if schema.features == "rest":
        filter_columns = set(schema.parsed_filter())
        features = [c for c in frame.columns if c not in role_columns and c not in filter_columns]
    else:
        features = list(schema.features)

    needed = list(dict.fromkeys(role_columns + features + list(schema.parsed_filter())))
    missing = [c for c in needed if c not in frame.columns]
    if missing:
        raise SchemaError(f"Columns missing from {path.name}: {', '.join(missing)}")
    if not features:
        raise SchemaError("Schema selects no feature columns")

    # Filter on the raw filter columns before parsing the rest
    conditions = schema.parsed_filter()
    if conditions:
        filter_values = _to_numeric(frame, list(conditions))
        keep = np.ones(len(frame), dtype=bool)
        for column, allowed in conditions.items():
            keep &= filter_values[column].isin(allowed).to_numpy()
        frame = frame.loc[keep]
    if frame.empty:
        raise EmptyDataError(f"No rows left in {path.name} after filtering")

    values = _to_numeric(frame, list(dict.fromkeys(role_columns + features)))

    outcome = values[schema.outcome].to_numpy()
    if schema.outcome_transform == "log_floor1":
        # Zero-week durations map to log(1) = 0
        outcome = np.log(np.maximum(outcome, 1.0))

    policy_raw = values[schema.policy].to_numpy()
    if schema.treated_value is not None:
        policy = (policy_raw == schema.treated_value).astype(np.float64)
    else:
        if not np.isin(policy_raw, (0.0, 1.0)).all():
            raise DataError(f"Policy column '{schema.policy}' must contain only 0 and 1")
        policy = policy_raw

    X = values[features].to_numpy()
    constant = [f for j, f in enumerate(features) if np.ptp(X[:, j]) == 0.0]
    if constant:
        logger.warning(f"Dropping constant feature columns: {', '.join(constant)}")
        kept = [j for j, f in enumerate(features) if f not in constant]
        X = X[:, kept]
        features = [features[j] for j in kept]
    if not features:
        raise EmptyDataError("Every feature column is constant")

    dataset = Dataset(
        features=X,
        outcome=outcome,
        policy=policy,
        feature_names=tuple(features),
        dropped_features=tuple(constant),
    )
    logger.info(
        f"Loaded {dataset.n} rows x {dataset.p} features from {path.name} "
        f"({dataset.n_treated} treated, {dataset.n_control} control)"
    )
    return dataset

