import logging
import sys
from typing import Optional

from cpcg.config import settings

ROOT_LOGGER_NAME = "cpcg"
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_DATEFMT = "%Y-%m-%d %H:%M:%S"


def _level(name: str) -> int:
    return getattr(logging, name.upper(), logging.INFO)


def setup_logging(level: Optional[str] = None) -> logging.Logger:
    """
    Configure the package root logger.

    Records go to stderr so stdout stays free for JSON and CSV output.

    Args:
        level: Level name overriding settings.LOG_LEVEL (e.g. "WARNING" for --quiet)

    Returns:
        The configured package root logger
    """
    level_value = _level(level or settings.LOG_LEVEL)

    logger = logging.getLogger(ROOT_LOGGER_NAME)
    logger.setLevel(level_value)

    # Remove existing handlers to avoid duplicates
    logger.handlers = []

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(level_value)
    console_handler.setFormatter(logging.Formatter(fmt=LOG_FORMAT, datefmt=LOG_DATEFMT))
    logger.addHandler(console_handler)
    logger.propagate = False

    return logger


def get_logger(name: str = ROOT_LOGGER_NAME) -> logging.Logger:
    """
    Get a logger instance with the specified name

    Module loggers (``cpcg.services.x``) inherit the root handler, so
    setup_logging() controls all of them at once.

    Args:
        name: Logger name (defaults to package root logger)

    Returns:
        Configured logger instance
    """
    root = logging.getLogger(ROOT_LOGGER_NAME)
    if not root.handlers:
        setup_logging()
    return logging.getLogger(name)
