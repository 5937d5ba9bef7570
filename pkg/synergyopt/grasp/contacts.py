"""Point contacts with friction and their linearized friction pyramids."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from synergyopt.constants import DEFAULT_FRICTION_EDGES, TANGENT_DEGENERATE_RAD, UNIT_NORM_TOL
from synergyopt.exceptions import GraspModelError
from synergyopt.types import FloatArray

_WORLD_X = np.array([1.0, 0.0, 0.0])
_WORLD_Y = np.array([0.0, 1.0, 0.0])


def _project_tangent(normal: FloatArray, hint: FloatArray) -> FloatArray | None:
    norm = float(np.linalg.norm(hint))
    if norm == 0.0:
        return None
    hint = hint / norm
    t1 = hint - float(hint @ normal) * normal
    # |t1| = sin(angle between hint and normal)
    if float(np.linalg.norm(t1)) < math.sin(TANGENT_DEGENERATE_RAD):
        return None
    return t1 / np.linalg.norm(t1)


def contact_frame(normal: FloatArray, hint: FloatArray | None = None) -> FloatArray:
    """Right-handed frame with columns (normal, tangent1, tangent2).

    tangent1 is ``hint`` projected onto the tangent plane; when that degenerates the
    world x axis (then y) is projected instead.
    """
    t1 = None if hint is None else _project_tangent(normal, hint)
    if t1 is None:
        t1 = _project_tangent(normal, _WORLD_X)
    if t1 is None:
        t1 = _project_tangent(normal, _WORLD_Y)
    if t1 is None:
        msg = "cannot build a tangent for a zero normal"
        raise GraspModelError(msg)
    t2 = np.cross(normal, t1)
    return np.column_stack([normal, t1, t2])


@dataclass(frozen=True, eq=False)
class Contact:
    """Point contact with friction.

    ``normal`` is the direction in which the finger pushes the object.
    ``tangent`` optionally fixes the tangent1 direction (the link long axis when
    the contact is resolved against hand kinematics).
    """

    link_id: str
    position: FloatArray
    normal: FloatArray
    mu: float
    m_edges: int = DEFAULT_FRICTION_EDGES
    tangent: FloatArray | None = None

    def __post_init__(self) -> None:
        if abs(float(np.linalg.norm(self.normal)) - 1.0) > UNIT_NORM_TOL:
            msg = f"contact on {self.link_id}: normal must have unit norm"
            raise GraspModelError(msg)
        if self.mu < 0.0:
            msg = f"contact on {self.link_id}: friction coefficient must be >= 0"
            raise GraspModelError(msg)

    @property
    def frame(self) -> FloatArray:
        return contact_frame(self.normal, self.tangent)

    def with_tangent(self, tangent: FloatArray) -> Contact:
        return replace(self, tangent=np.asarray(tangent, dtype=float))


@dataclass(frozen=True, eq=False)
class ContactBasis:
    """D_k (edges in the contact frame) and F_k (extra friction rows, F_k β_k <= 0)."""

    D: FloatArray  # 3 x m
    F: FloatArray  # rows x m
    frame: FloatArray  # 3 x 3 world columns (n, t1, t2)

    @property
    def n_edges(self) -> int:
        return int(self.D.shape[1])

    @property
    def edges_world(self) -> FloatArray:
        return self.frame @ self.D


def build_contact_basis(contact: Contact) -> ContactBasis:
    """Edge parameterization of the friction pyramid.

    Column j is normalize(n + μ(cos φ_j t1 + sin φ_j t2)), φ_j = 2πj/m, written in the
    contact frame. A frictionless contact collapses to the single normal column. Any
    β >= 0 stays inside the pyramid, so F_k has no rows.
    """
    frame = contact.frame
    if contact.mu == 0.0:
        D = np.array([[1.0], [0.0], [0.0]])
    else:
        if contact.m_edges < 3:
            msg = f"contact on {contact.link_id}: a friction pyramid needs >= 3 edges"
            raise GraspModelError(msg)
        phi = 2.0 * np.pi * np.arange(contact.m_edges) / contact.m_edges
        D = np.vstack(
            [
                np.ones_like(phi),
                contact.mu * np.cos(phi),
                contact.mu * np.sin(phi),
            ]
        )
        D = D / np.linalg.norm(D, axis=0)
    return ContactBasis(D=D, F=np.zeros((0, D.shape[1])), frame=frame)
