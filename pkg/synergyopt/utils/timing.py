"""Wall-clock measurement for search phases."""

from __future__ import annotations

import time
from contextlib import contextmanager
from typing import TYPE_CHECKING

import structlog

if TYPE_CHECKING:
    from collections.abc import Generator

logger = structlog.get_logger(__name__)


@contextmanager
def timed(label: str, items: int = 0) -> Generator[dict[str, float], None, None]:
    """Measure elapsed wall-clock time and, when ``items`` is given, throughput.

    Usage::

        with timed("force_search", items=n_combos) as t:
            run_search()
        t["elapsed"], t["rate"]  # seconds, items per second
    """
    result: dict[str, float] = {"elapsed": 0.0, "rate": 0.0}
    start = time.monotonic()
    try:
        yield result
    finally:
        result["elapsed"] = time.monotonic() - start
        if items and result["elapsed"] > 0.0:
            result["rate"] = items / result["elapsed"]
        logger.debug(
            "timed", label=label, elapsed_seconds=result["elapsed"], items_per_second=result["rate"]
        )

