"""Grasp samples and the per-grasp linear system (J, G, D, F, A)."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING

import numpy as np
import structlog
from scipy.linalg import block_diag

from synergyopt.constants import DEFAULT_FRICTION_EDGES, OPEN_POSE_NAME
from synergyopt.exceptions import GraspModelError
from synergyopt.grasp.contacts import Contact, build_contact_basis
from synergyopt.hand.kinematics import contact_jacobian, forward_kinematics, resolve_contacts
from synergyopt.hand.transforms import make_transform
from synergyopt.models.documents import GraspSetDoc, load_document, parse_document
from synergyopt.types import FloatArray

if TYPE_CHECKING:
    from collections.abc import Mapping, Sequence
    from pathlib import Path
    from typing import Any

    from synergyopt.hand.model import HandKinematics

logger = structlog.get_logger(__name__)


@dataclass(frozen=True, eq=False)
class GraspSample:
    """One desired grasp (or a contact-free pose for the kinematic phase)."""

    name: str
    theta: FloatArray
    object_pose: FloatArray = field(default_factory=lambda: np.eye(4))
    contacts: tuple[Contact, ...] = ()
    weight: float = 1.0
    is_open: bool = False
    weight_given: bool = False  # weight came from the document, not the default

    def __post_init__(self) -> None:
        if self.weight < 0.0:
            msg = f"grasp {self.name}: weight must be >= 0"
            raise GraspModelError(msg)


@dataclass(frozen=True, eq=False)
class GraspMatrices:
    J: FloatArray  # 3n_c x n_q
    G: FloatArray  # 6 x 3n_c
    D: FloatArray  # 3n_c x Σm
    F: FloatArray  # rows x Σm
    A: FloatArray  # n_q x n_t
    grasp_name: str = ""

    @property
    def n_c(self) -> int:
        return self.J.shape[0] // 3

    @property
    def n_q(self) -> int:
        return int(self.J.shape[1])

    @property
    def n_t(self) -> int:
        return int(self.A.shape[1])

    @property
    def n_beta(self) -> int:
        return int(self.D.shape[1])

    @property
    def torque_map(self) -> FloatArray:
        """JᵀD: edge amplitudes β to equilibrium joint torques τ_eq."""
        return self.J.T @ self.D

    @property
    def wrench_map(self) -> FloatArray:
        """GD: edge amplitudes β to net object wrench."""
        return self.G @ self.D

    def with_actuation(self, A: FloatArray) -> GraspMatrices:
        if A.shape[0] != self.n_q:
            msg = f"actuation matrix has {A.shape[0]} rows, hand has {self.n_q} joints"
            raise GraspModelError(msg)
        return replace(self, A=A)


@dataclass(frozen=True, eq=False)
class StabilityResult:
    """Force-phase outcome for one grasp: edge amplitudes, net tensions, unbalanced torques."""

    grasp_name: str
    beta: FloatArray
    t_net: FloatArray
    delta_tau: FloatArray
    q: float
    feasible: bool = True

    @classmethod
    def infeasible(cls, grasp_name: str) -> StabilityResult:
        empty = np.zeros(0)
        return cls(grasp_name, empty, empty, empty, float("inf"), feasible=False)


def _skew(v: FloatArray) -> FloatArray:
    return np.array([[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]])


def grasp_map(contacts: Sequence[Contact], object_pose: FloatArray) -> FloatArray:
    """6 x 3n_c map from contact-frame forces to the wrench about the object origin."""
    if not contacts:
        msg = "grasp map needs at least one contact"
        raise GraspModelError(msg)
    origin = object_pose[:3, 3]
    G = np.zeros((6, 3 * len(contacts)))
    for k, contact in enumerate(contacts):
        frame = contact.frame
        G[:3, 3 * k : 3 * k + 3] = frame
        G[3:, 3 * k : 3 * k + 3] = _skew(contact.position - origin) @ frame
    return G


def actuation_matrix(hand: HandKinematics, r: Mapping[str, float]) -> FloatArray:
    """A[j, t] = sign · r_j for every joint j crossed by tendon t, zero elsewhere."""
    A = np.zeros((hand.n_joints, len(hand.tendons)))
    for t, tendon in enumerate(hand.tendons):
        for joint_id, sign in tendon.crossings:
            if joint_id not in r:
                msg = f"missing moment arm for joint {joint_id!r} (tendon {tendon.tendon_id})"
                raise GraspModelError(msg)
            radius = float(r[joint_id])
            if radius <= 0.0:
                msg = f"moment arm for joint {joint_id!r} must be positive"
                raise GraspModelError(msg)
            A[hand.joint_index[joint_id], t] = sign * radius
    return A


def contact_system(hand: HandKinematics, grasp: GraspSample) -> GraspMatrices:
    """J, G, D, F for a grasp; A is left empty (n_q x 0) for the caller to attach."""
    if not grasp.contacts:
        msg = f"grasp {grasp.name} has no contacts"
        raise GraspModelError(msg)
    pose = forward_kinematics(hand, grasp.theta)
    contacts = resolve_contacts(hand, pose, grasp.contacts)
    J = contact_jacobian(hand, grasp.theta, contacts, pose=pose)
    G = grasp_map(contacts, grasp.object_pose)
    bases = [build_contact_basis(c) for c in contacts]
    D = block_diag(*[b.D for b in bases])
    if any(b.F.shape[0] for b in bases):
        F = block_diag(*[b.F for b in bases])
    else:
        F = np.zeros((0, D.shape[1]))
    return GraspMatrices(
        J=J, G=G, D=D, F=F, A=np.zeros((hand.n_joints, 0)), grasp_name=grasp.name
    )


def assemble_grasp_system(
    hand: HandKinematics, grasp: GraspSample, r: Mapping[str, float]
) -> GraspMatrices:
    """Full per-grasp system at the given moment arms."""
    return contact_system(hand, grasp).with_actuation(actuation_matrix(hand, r))


def grasps_from_document(
    doc: GraspSetDoc, hand: HandKinematics, edges_default: int = DEFAULT_FRICTION_EDGES
) -> list[GraspSample]:
    grasps: list[GraspSample] = []
    names: set[str] = set()
    for gd in doc.grasps:
        if gd.name in names:
            msg = f"duplicate grasp name {gd.name!r}"
            raise GraspModelError(msg)
        names.add(gd.name)
        if len(gd.theta_rad) != hand.n_joints:
            msg = (
                f"grasp {gd.name}: theta_rad has {len(gd.theta_rad)} entries, "
                f"hand has {hand.n_joints} joints"
            )
            raise GraspModelError(msg)
        contacts = []
        for cd in gd.contacts:
            normal = np.asarray(cd.normal, dtype=float)
            contacts.append(
                Contact(
                    link_id=cd.link,
                    position=np.asarray(cd.position_m, dtype=float),
                    normal=normal / np.linalg.norm(normal),
                    mu=cd.mu,
                    m_edges=cd.edges if cd.edges is not None else edges_default,
                    tangent=None if cd.tangent is None else np.asarray(cd.tangent, dtype=float),
                )
            )
        grasps.append(
            GraspSample(
                name=gd.name,
                theta=np.asarray(gd.theta_rad, dtype=float),
                object_pose=make_transform(gd.object_pose.position_m, gd.object_pose.rpy_rad),
                contacts=tuple(contacts),
                weight=gd.weight,
                is_open=gd.open or gd.name == OPEN_POSE_NAME,
                weight_given="weight" in gd.model_fields_set,
            )
        )
    logger.debug(
        "grasps_loaded",
        count=len(grasps),
        with_contacts=sum(1 for g in grasps if g.contacts),
    )
    return grasps


def load_grasps(
    source: Path | dict[str, Any],
    hand: HandKinematics,
    edges_default: int = DEFAULT_FRICTION_EDGES,
) -> list[GraspSample]:
    """Load a grasp set from a file path or an already-parsed mapping."""
    if isinstance(source, dict):
        doc = parse_document(GraspSetDoc, source, source="grasps")
    else:
        doc = load_document(GraspSetDoc, source)
    return grasps_from_document(doc, hand, edges_default)
