"""Straight-line manifolds reached by single-tendon fingers closing without contact."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
import structlog

from synergyopt.exceptions import AnalysisError
from synergyopt.types import FloatArray

if TYPE_CHECKING:
    from synergyopt.analysis.pca import PCAResult
    from synergyopt.hand.model import ActuationParams, HandKinematics

logger = structlog.get_logger(__name__)


@dataclass(frozen=True, eq=False)
class MRManifold:
    """θ(t) = direction·t + offset for net tendon tension t (N)."""

    finger_id: str
    joint_ids: tuple[str, ...]
    direction: FloatArray  # rad/N
    offset: FloatArray  # rad
    parameter_range: tuple[float, float] | None  # None when the line misses the joint limits

    def point(self, t: float) -> FloatArray:
        return self.direction * t + self.offset

    @property
    def reachable(self) -> bool:
        return self.parameter_range is not None


def _tension_range(
    direction: FloatArray, offset: FloatArray, limits: list[tuple[float, float]]
) -> tuple[float, float] | None:
    lo, hi = 0.0, np.inf
    for d, o, (q_min, q_max) in zip(direction, offset, limits, strict=True):
        if d == 0.0:
            if not q_min <= o <= q_max:
                return None
            continue
        a, b = (q_min - o) / d, (q_max - o) / d
        lo, hi = max(lo, min(a, b)), min(hi, max(a, b))
    if lo > hi:
        return None
    return float(lo), float(hi)


def derive_mrm(hand: HandKinematics, params: ActuationParams, finger_id: str) -> MRManifold:
    """Zero unbalanced torque along the finger: sign·r·t = K(θ + θ0)."""
    finger = hand.finger(finger_id)
    tendons = hand.tendons_of_finger(finger_id)
    if len(tendons) != 1:
        msg = f"finger {finger_id} is driven by {len(tendons)} tendons; one is required"
        raise AnalysisError(msg)
    signs = dict(tendons[0].crossings)
    joint_ids = tuple(j.id for j in finger.joints)
    missing = [j for j in joint_ids if j not in params.K or j not in params.theta0]
    missing += [j for j in joint_ids if j in signs and j not in params.r]
    if missing:
        msg = f"finger {finger_id}: parameters missing for joints {sorted(set(missing))}"
        raise AnalysisError(msg)

    direction = np.array(
        [signs[j] * params.r[j] / params.K[j] if j in signs else 0.0 for j in joint_ids]
    )
    offset = -np.array([params.theta0[j] for j in joint_ids])
    t_range = _tension_range(direction, offset, [j.angle_limits for j in finger.joints])
    if t_range is None:
        logger.warning("manifold_outside_joint_limits", finger=finger_id)
    return MRManifold(
        finger_id=finger_id,
        joint_ids=joint_ids,
        direction=direction,
        offset=offset,
        parameter_range=t_range,
    )


def mrm_distance(manifold: MRManifold, theta: FloatArray) -> float:
    """Joint-space distance from ``theta`` to the manifold segment.

    An unreachable manifold is measured along its whole ray t ≥ 0.
    """
    theta = np.asarray(theta, dtype=float)
    if theta.shape != manifold.offset.shape:
        msg = f"pose has {theta.shape[0]} angles, manifold has {manifold.offset.shape[0]}"
        raise AnalysisError(msg)
    lo, hi = manifold.parameter_range or (0.0, np.inf)
    dd = float(manifold.direction @ manifold.direction)
    t = 0.0 if dd == 0.0 else float(manifold.direction @ (theta - manifold.offset)) / dd
    t = min(max(t, lo), hi)
    return float(np.linalg.norm(theta - manifold.point(t)))


def mrm_alignment(manifold: MRManifold, pca: PCAResult) -> float:
    """|cos| of the angle between the manifold and the first principal component."""
    if pca.components.shape[1] != manifold.direction.shape[0]:
        msg = "principal components and manifold live in different joint spaces"
        raise AnalysisError(msg)
    norm = float(np.linalg.norm(manifold.direction))
    if norm == 0.0:
        return 0.0
    return float(abs(pca.components[0] @ manifold.direction) / norm)
