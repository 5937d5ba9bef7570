import logging

import numpy as np
import pytest

from synergyopt.config.logging import _plain_numbers, active_logging, setup_logging


@pytest.mark.unit
class TestLoggingSetup:
    def test_numpy_values_become_builtins(self) -> None:
        event = _plain_numbers(
            None, "info", {"q": np.float64(0.5), "n": np.int64(3), "r": np.array([1.0, 2.0])}
        )
        assert event == {"q": 0.5, "n": 3, "r": [1.0, 2.0]}
        assert type(event["n"]) is int

    def test_records_arguments_for_workers(self) -> None:
        setup_logging("DEBUG", json_output=True)
        try:
            assert active_logging() == ("DEBUG", True)
            assert logging.getLogger().level == logging.DEBUG
        finally:
            setup_logging("INFO")
            logging.captureWarnings(False)
