"""Shared test fixtures."""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np
import pytest

from synergyopt import fixtures
from synergyopt.config.settings import get_settings
from synergyopt.constants import MM, NMM_PER_RAD
from synergyopt.grasp.matrices import load_grasps
from synergyopt.hand.model import ActuationParams, HandKinematics, load_hand
from synergyopt.optimizer.grid import ParameterGrid, load_grid

if TYPE_CHECKING:
    from collections.abc import Callable

FIXTURES_DIR = Path(__file__).parent / "fixtures"


@pytest.fixture(autouse=True)
def _clear_settings_cache(monkeypatch: pytest.MonkeyPatch) -> None:
    """Tests never see a developer's SYNERGY_* environment."""
    for key in list(os.environ):
        if key.startswith("SYNERGY_"):
            monkeypatch.delenv(key)
    get_settings.cache_clear()


@pytest.fixture()
def fixtures_dir() -> Path:
    return FIXTURES_DIR


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture()
def reference_hand() -> HandKinematics:
    return load_hand(fixtures.reference_hand_document())


@pytest.fixture()
def reference_params() -> ActuationParams:
    """Hand-picked reference values; finger1 cannot reach its joint limits."""

    def mirrored(values: dict[str, float]) -> dict[str, float]:
        return {**values, **{f"{j}2": values[j] for j in ("fr", "fp", "fd")}}

    r_mm = mirrored({"tp": 12.0, "td": 4.0, "fr": 2.0, "fp": 12.0, "fd": 4.0})
    k_nmm = mirrored({"tp": 6.82, "td": 1.80, "fr": 2.11, "fp": 6.82, "fd": 1.80})
    return ActuationParams(
        r={j: v * MM for j, v in r_mm.items()},
        K={j: v * NMM_PER_RAD for j, v in k_nmm.items()},
        theta0=mirrored({"tp": 4.441, "td": 4.712, "fr": 1.0, "fp": 2.0, "fd": 1.5}),
    )


@pytest.fixture()
def pinch_hand() -> HandKinematics:
    return load_hand(fixtures.pinch_hand_document())


@pytest.fixture()
def pinch_grasps(pinch_hand: HandKinematics):
    return load_grasps(fixtures.pinch_grasps_document(), pinch_hand)


@pytest.fixture()
def tripod_hand() -> HandKinematics:
    return load_hand(fixtures.tripod_hand_document())


@pytest.fixture()
def tripod_grasps(tripod_hand: HandKinematics):
    return load_grasps(fixtures.tripod_grasps_document(), tripod_hand)


@pytest.fixture()
def two_joint_hand() -> HandKinematics:
    return load_hand(fixtures.two_joint_finger_document())


@pytest.fixture()
def two_joint_poses(two_joint_hand: HandKinematics):
    return load_grasps(fixtures.two_joint_poses_document(), two_joint_hand)


@pytest.fixture()
def two_joint_grid() -> ParameterGrid:
    return load_grid(fixtures.two_joint_grid_document())


@pytest.fixture()
def write_doc(tmp_path: Path) -> Callable[[str, dict[str, Any]], Path]:
    """Write a document dict as JSON under tmp_path and return its path."""

    def _write(name: str, payload: dict[str, Any]) -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(payload, indent=2), encoding="utf-8")
        return path

    return _write
