"""Unit tests for synergyopt/utils/timing.py."""

from __future__ import annotations

import time
from unittest.mock import patch

import pytest

from synergyopt.utils.timing import timed


@pytest.mark.unit
class TestTimedContextManager:
    def test_returns_elapsed_and_rate(self) -> None:
        with timed("test_operation") as t:
            pass
        assert set(t) == {"elapsed", "rate"}

    def test_elapsed_starts_at_zero_inside_block(self) -> None:
        with timed("test_operation") as t:
            in_block_value = t["elapsed"]
        assert in_block_value == 0.0

    def test_elapsed_is_positive_after_block(self) -> None:
        with timed("some_work") as t:
            time.sleep(0.01)
        assert t["elapsed"] > 0.0

    def test_rate_counts_items_per_second(self) -> None:
        with timed("search", items=100) as t:
            time.sleep(0.01)
        assert t["rate"] == pytest.approx(100 / t["elapsed"])

    def test_rate_stays_zero_without_items(self) -> None:
        with timed("search") as t:
            time.sleep(0.001)
        assert t["rate"] == 0.0

    def test_elapsed_updated_after_exception(self) -> None:
        with pytest.raises(ValueError), timed("failing_op") as t:
            raise ValueError("boom")
        assert t["elapsed"] >= 0.0

    def test_label_forwarded_to_logger(self) -> None:
        with patch("synergyopt.utils.timing.logger") as mock_logger, timed("force_search"):
            pass
        assert mock_logger.debug.call_args.kwargs["label"] == "force_search"

