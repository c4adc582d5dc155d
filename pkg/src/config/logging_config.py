"""Centralized logging setup."""

import sys

from loguru import logger

from src.config.settings import settings

LOG_FORMAT = (
    "<green>{time:HH:mm:ss}</green> | <level>{level: <8}</level> | "
    "<cyan>{name}</cyan>:<cyan>{line}</cyan> - <level>{message}</level>"
)


def configure_logging(level: str | None = None, log_file: str | None = None) -> None:
    """
    Install the stderr sink (and an optional file sink).

    Args:
        level: Minimum level, defaults to settings.log_level
        log_file: Optional path for a plain-text log file
    """
    level = (level or settings.log_level).upper()
    log_file = log_file or settings.log_file

    logger.remove()
    logger.add(sys.stderr, level=level, format=LOG_FORMAT)
    if log_file:
        logger.add(log_file, level=level, rotation="10 MB", enqueue=True)
