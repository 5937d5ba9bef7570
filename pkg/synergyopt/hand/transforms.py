"""Homogeneous transform helpers."""

from __future__ import annotations

import numpy as np
from scipy.spatial.transform import Rotation

from synergyopt.types import FloatArray


def make_transform(
    translation: FloatArray | tuple[float, ...], rpy: tuple[float, ...]
) -> FloatArray:
    """Build a 4x4 transform from a translation and fixed-axis roll/pitch/yaw."""
    T = np.eye(4)
    T[:3, :3] = Rotation.from_euler("xyz", rpy).as_matrix()
    T[:3, 3] = np.asarray(translation, dtype=float)
    return T


def axis_rotation(axis: FloatArray, angle: float) -> FloatArray:
    """4x4 rotation about a unit axis through the origin."""
    T = np.eye(4)
    T[:3, :3] = Rotation.from_rotvec(np.asarray(axis, dtype=float) * angle).as_matrix()
    return T
