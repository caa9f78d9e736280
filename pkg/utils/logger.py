import logging
import sys

import structlog

from config.settings import settings

def setup_logger(name: str) -> logging.Logger:
    """Configure structured logger (key=value lines on stderr)."""
    logger = logging.getLogger(name)
    logger.setLevel(settings.LOG_LEVEL)

    if logger.handlers:
        return logger

    # Console handler; stdout is reserved for command output
    handler = logging.StreamHandler(sys.stderr)
    handler.setLevel(settings.LOG_LEVEL)

    # Format
    formatter = structlog.stdlib.ProcessorFormatter(
        processor=structlog.processors.KeyValueRenderer(
            key_order=["timestamp", "level", "logger", "event"]
        ),
        foreign_pre_chain=[
            structlog.stdlib.add_log_level,
            structlog.stdlib.add_logger_name,
            structlog.processors.TimeStamper(fmt="%Y-%m-%d %H:%M:%S"),
        ],
    )
    handler.setFormatter(formatter)

    logger.addHandler(handler)
    return logger
