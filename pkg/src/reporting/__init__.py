"""Vigintile effect reports and output writers."""

from src.reporting.vigintiles import VigintileReport, assign_vigintiles, build_vigintile_report
from src.reporting.writers import effects_frame, vigintile_file, write_frame, write_summary

__all__ = [
    "VigintileReport",
    "assign_vigintiles",
    "build_vigintile_report",
    "effects_frame",
    "vigintile_file",
    "write_frame",
    "write_summary",
]
