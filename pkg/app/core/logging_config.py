"""Logging Config."""

import logging.config
from typing import Any, Dict

RUN_FORMAT = "%(asctime)s %(levelname)-7s [%(name)s] %(message)s"

# Per-op and per-coordinate detail stays quiet unless asked for.
QUIET_LOGGERS = ("app.autodiff", "app.geometry")


def logging_config(level: str = "INFO") -> Dict[str, Any]:
    """dictConfig for a CLI run: ``app`` at ``level``, everything else warnings."""
    level = level.upper()
    quiet = "DEBUG" if level == "DEBUG" else "WARNING"
    return {
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {"run": {"format": RUN_FORMAT, "datefmt": "%H:%M:%S"}},
        "handlers": {
            "stderr": {
                "class": "logging.StreamHandler",
                "formatter": "run",
                "stream": "ext://sys.stderr",
            },
        },
        "root": {"level": "WARNING", "handlers": ["stderr"]},
        "loggers": {
            "app": {"level": level, "handlers": ["stderr"], "propagate": False},
            **{name: {"level": quiet} for name in QUIET_LOGGERS},
        },
    }


def setup_logging(level: str = "INFO"):
    """Setup logging."""
    logging.config.dictConfig(logging_config(level))
