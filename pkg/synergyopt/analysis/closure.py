"""Sampled-direction force-closure margin.

For each unit wrench direction u the LP  max ε  s.t.  W β = ε u,  Σ normal force = 1,
β ≥ 0  measures how far the grasp can push along u. The margin is the minimum over
directions sampled in the force subspace and in the torque subspace; it is positive
only when the origin lies strictly inside the achievable wrench set.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING

import numpy as np
import structlog
from scipy.linalg import block_diag
from scipy.optimize import linprog

from synergyopt.constants import CLOSURE_TOL, DEFAULT_CLOSURE_SUBDIVISIONS
from synergyopt.exceptions import AnalysisError
from synergyopt.grasp.matrices import contact_system
from synergyopt.types import FloatArray

if TYPE_CHECKING:
    from synergyopt.grasp.matrices import GraspSample
    from synergyopt.hand.model import HandKinematics

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class ForceClosureReport:
    grasp: str
    margin: float
    force_margin: float
    torque_margin: float
    directions: int

    @property
    def is_closure(self) -> bool:
        return self.margin > CLOSURE_TOL


@lru_cache(maxsize=8)
def icosphere_directions(subdivisions: int = DEFAULT_CLOSURE_SUBDIVISIONS) -> FloatArray:
    """Unit vertices of a subdivided icosahedron (10·4ⁿ + 2 points)."""
    if subdivisions < 0:
        msg = "subdivisions must be >= 0"
        raise AnalysisError(msg)
    phi = (1.0 + 5.0**0.5) / 2.0
    vertices = [
        (-1, phi, 0), (1, phi, 0), (-1, -phi, 0), (1, -phi, 0),
        (0, -1, phi), (0, 1, phi), (0, -1, -phi), (0, 1, -phi),
        (phi, 0, -1), (phi, 0, 1), (-phi, 0, -1), (-phi, 0, 1),
    ]  # fmt: skip
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]  # fmt: skip
    points = [np.asarray(v, dtype=float) / np.linalg.norm(v) for v in vertices]
    for _ in range(subdivisions):
        midpoints: dict[tuple[int, int], int] = {}

        def midpoint(a: int, b: int) -> int:
            key = (min(a, b), max(a, b))
            if key not in midpoints:
                m = points[a] + points[b]
                points.append(m / np.linalg.norm(m))
                midpoints[key] = len(points) - 1
            return midpoints[key]

        refined = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            refined += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = refined
    out = np.array(points)
    out.setflags(write=False)
    return out


def contact_offsets(G: FloatArray) -> FloatArray:
    """Contact positions relative to the wrench reference point, recovered from G."""
    offsets = []
    for k in range(G.shape[1] // 3):
        frame = G[:3, 3 * k : 3 * k + 3]
        skew = G[3:, 3 * k : 3 * k + 3] @ frame.T
        offsets.append([skew[2, 1], skew[0, 2], skew[1, 0]])
    return np.array(offsets)


def _direction_margin(W: FloatArray, normal: FloatArray, u: FloatArray) -> float:
    n_beta = W.shape[1]
    c = np.zeros(n_beta + 1)
    c[-1] = -1.0
    A_eq = np.vstack(
        [
            np.hstack([W, -u[:, None]]),
            np.concatenate([normal, [0.0]])[None, :],
        ]
    )
    b_eq = np.concatenate([np.zeros(W.shape[0]), [1.0]])
    bounds = [(0.0, None)] * n_beta + [(None, None)]
    res = linprog(c, A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs")
    if res.status == 2:  # direction unreachable
        return 0.0
    if res.status != 0:
        msg = f"closure LP failed: {res.message}"
        raise AnalysisError(msg)
    return float(-res.fun)


def force_closure_margin(
    G: FloatArray,
    D: FloatArray,
    *,
    grasp: str = "",
    subdivisions: int = DEFAULT_CLOSURE_SUBDIVISIONS,
    object_rotation: FloatArray | None = None,
) -> ForceClosureReport:
    """Lower bound on the L1 Ferrari-Canny quality, normalized to unit total normal force.

    This is a subspace margin: directions are sampled in the pure-force and pure-torque
    subspaces only, so it is not the full 6-D Ferrari-Canny number. Its sign still decides
    closure.

    Torques are divided by the largest contact distance so both subspaces share units.
    With ``object_rotation`` the wrenches are expressed in object axes before sampling.
    """
    if G.shape[1] == 0 or D.shape[1] == 0:
        msg = f"grasp {grasp or '?'} has no contacts"
        raise AnalysisError(msg)
    radius = float(np.max(np.linalg.norm(contact_offsets(G), axis=1)))
    scale = np.diag([1.0, 1.0, 1.0] + [1.0 / radius if radius > 0.0 else 1.0] * 3)
    W = scale @ G @ D
    if object_rotation is not None:
        W = block_diag(object_rotation.T, object_rotation.T) @ W
    # Contact-frame columns of D lead with the normal component.
    normal = np.zeros(D.shape[1])
    for k in range(D.shape[0] // 3):
        normal += D[3 * k]

    dirs = icosphere_directions(subdivisions)
    zeros = np.zeros(3)
    force_margin = min(_direction_margin(W, normal, np.concatenate([d, zeros])) for d in dirs)
    torque_margin = min(_direction_margin(W, normal, np.concatenate([zeros, d])) for d in dirs)
    report = ForceClosureReport(
        grasp=grasp,
        margin=min(force_margin, torque_margin),
        force_margin=force_margin,
        torque_margin=torque_margin,
        directions=2 * len(dirs),
    )
    logger.debug(
        "closure_margin",
        grasp=grasp,
        margin=report.margin,
        force_margin=force_margin,
        torque_margin=torque_margin,
    )
    return report


def grasp_closure(
    hand: HandKinematics,
    grasp: GraspSample,
    subdivisions: int = DEFAULT_CLOSURE_SUBDIVISIONS,
) -> ForceClosureReport:
    """Closure margin of a grasp at its recorded joint angles."""
    system = contact_system(hand, grasp)
    return force_closure_margin(
        system.G,
        system.D,
        grasp=grasp.name,
        subdivisions=subdivisions,
        object_rotation=grasp.object_pose[:3, :3],
    )
