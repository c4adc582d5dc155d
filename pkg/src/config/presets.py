"""Ingestion presets for known datasets."""

from src.models.schemas import IngestionSchema

# Pennsylvania "Reemployment Bonus" Demonstration (Bilias, 2000).
# Variables: http://qed.econ.queensu.ca/jae/2000-v15.6/bilias/readme.b.txt
PENN_SOURCE_URL = "http://qed.econ.queensu.ca/jae/2000-v15.6/bilias/"

PENN_FEATURES = [
    "abdt",
    "female",
    "black",
    "hispanic",
    "othrace",
    "dep",
    "q1",
    "q2",
    "q3",
    "q4",
    "q5",
    "q6",
    "recall",
    "agelt35",
    "agegt54",
    "durable",
    "nondurable",
    "lusd",
    "husd",
    "muld",
]

# Control group (tg = 0) against treatment group 4 (high bonus, long qualification, workshop)
PENN_SCHEMA = IngestionSchema(
    outcome="inuidur1",
    policy="tg",
    features=PENN_FEATURES,
    filter=["tg=0", "tg=4"],
    treated_value=4,
    outcome_transform="log_floor1",
    delimiter=r"\s+",
)

PRESETS: dict[str, IngestionSchema] = {"penn": PENN_SCHEMA}
