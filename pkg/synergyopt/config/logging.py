"""Structured logging configuration using structlog."""

from __future__ import annotations

import logging
import sys
from typing import Any

import numpy as np
import structlog

# (log_level, json_output) of the last setup_logging call; search workers reuse it.
_active: tuple[str, bool] | None = None


def _plain_numbers(_logger: Any, _method: str, event_dict: dict[str, Any]) -> dict[str, Any]:
    """Render numpy scalars and arrays as builtins."""
    for key, value in event_dict.items():
        if isinstance(value, np.ndarray):
            event_dict[key] = value.tolist()
        elif isinstance(value, np.generic):
            event_dict[key] = value.item()
    return event_dict


def setup_logging(log_level: str = "INFO", json_output: bool = False) -> None:
    """Configure structlog for the command-line tools.

    Logs go to stderr so stdout stays reserved for command results. Python warnings
    (SciPy's OptimizeWarning among them) are routed into the same stream.
    """
    global _active  # noqa: PLW0603
    shared_processors: list[structlog.types.Processor] = [
        structlog.contextvars.merge_contextvars,
        structlog.stdlib.add_logger_name,
        structlog.stdlib.add_log_level,
        structlog.processors.TimeStamper(fmt="iso"),
        _plain_numbers,
        structlog.processors.StackInfoRenderer(),
        structlog.processors.format_exc_info,
    ]

    if json_output or not sys.stderr.isatty():
        renderer: structlog.types.Processor = structlog.processors.JSONRenderer()
    else:
        renderer = structlog.dev.ConsoleRenderer()

    structlog.configure(
        processors=[*shared_processors, renderer],
        wrapper_class=structlog.stdlib.BoundLogger,
        logger_factory=structlog.stdlib.LoggerFactory(),
        cache_logger_on_first_use=True,
    )

    logging.basicConfig(
        format="%(message)s",
        stream=sys.stderr,
        level=getattr(logging, log_level.upper(), logging.INFO),
        force=True,
    )
    logging.captureWarnings(True)
    _active = (log_level, json_output)


def active_logging() -> tuple[str, bool] | None:
    """Arguments of the last ``setup_logging`` call, or None when logging is unconfigured."""
    return _active
