"""
Logging setup
Location: utils/logger.py

Configures the stdlib logging tree once from LOGGING_CONFIG and hands out
module loggers.
"""

import logging
from logging.handlers import RotatingFileHandler

from config import LOGGING_CONFIG, LOGS_DIR

_ROOT_NAME = "hts"
_configured = False


def configure_logging(level: str = None) -> logging.Logger:
    """Attach handlers to the package root logger (idempotent)."""
    global _configured
    root = logging.getLogger(_ROOT_NAME)

    if _configured and level is None:
        return root

    root.setLevel(level or LOGGING_CONFIG["log_level"])
    root.propagate = False
    for handler in list(root.handlers):
        root.removeHandler(handler)

    if not LOGGING_CONFIG["enabled"]:
        root.addHandler(logging.NullHandler())
        _configured = True
        return root

    formatter = logging.Formatter(LOGGING_CONFIG["log_format"])

    if LOGGING_CONFIG["log_to_console"]:
        console = logging.StreamHandler()
        console.setFormatter(formatter)
        root.addHandler(console)

    if LOGGING_CONFIG["log_to_file"]:
        LOGS_DIR.mkdir(exist_ok=True, parents=True)
        file_handler = RotatingFileHandler(
            LOGS_DIR / "hts.log",
            maxBytes=LOGGING_CONFIG["max_log_size_mb"] * 1024 * 1024,
            backupCount=3,
        )
        file_handler.setFormatter(formatter)
        root.addHandler(file_handler)

    _configured = True
    return root


def get_logger(name: str) -> logging.Logger:
    """Return a child of the package logger, e.g. get_logger(__name__)."""
    configure_logging()
    return logging.getLogger(f"{_ROOT_NAME}.{name}")
