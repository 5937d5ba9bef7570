"""Forward kinematics and contact Jacobians for serial finger chains."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
import structlog

from synergyopt.exceptions import HandModelError
from synergyopt.hand.model import PALM_LINK
from synergyopt.hand.transforms import axis_rotation

if TYPE_CHECKING:
    from collections.abc import Sequence

    from synergyopt.grasp.contacts import Contact
    from synergyopt.hand.model import HandKinematics
    from synergyopt.types import FloatArray

logger = structlog.get_logger(__name__)

_LINK_X = np.array([1.0, 0.0, 0.0])


@dataclass(frozen=True, eq=False)
class HandPose:
    """World poses of every joint frame (after the joint rotation) for one θ."""

    palm: FloatArray
    joints: dict[str, FloatArray]
    joint_origins: dict[str, FloatArray]  # joint frame origin before rotation (same point)
    joint_axes: dict[str, FloatArray]  # world rotation axis
    tips: dict[str, FloatArray]  # finger name -> fingertip position
    out_of_limits: tuple[str, ...] = ()


def _as_theta(hand: HandKinematics, theta: Sequence[float] | FloatArray) -> FloatArray:
    arr = np.asarray(theta, dtype=float)
    if arr.shape != (hand.n_joints,):
        msg = f"expected {hand.n_joints} joint angles, got shape {arr.shape}"
        raise HandModelError(msg)
    return arr


def forward_kinematics(hand: HandKinematics, theta: Sequence[float] | FloatArray) -> HandPose:
    """Compose joint poses root to tip for every finger.

    Angles outside the joint limits are allowed (sample grasps may sit on a limit)
    and reported through ``out_of_limits``.
    """
    q = _as_theta(hand, theta)
    joints: dict[str, FloatArray] = {}
    origins: dict[str, FloatArray] = {}
    axes: dict[str, FloatArray] = {}
    tips: dict[str, FloatArray] = {}
    outside: list[str] = []

    for finger in hand.fingers:
        parent = hand.palm_frame
        for joint in finger.joints:
            angle = float(q[hand.joint_index[joint.id]])
            lo, hi = joint.angle_limits
            if not lo <= angle <= hi:
                outside.append(joint.id)
            pre = parent @ joint.origin_offset
            origins[joint.id] = pre[:3, 3].copy()
            axes[joint.id] = pre[:3, :3] @ joint.rotation_axis
            parent = pre @ axis_rotation(joint.rotation_axis, angle)
            joints[joint.id] = parent
        tip_local = finger.tip_offset if finger.tip_offset is not None else np.zeros(3)
        tips[finger.name] = parent[:3, :3] @ tip_local + parent[:3, 3]

    if outside:
        logger.debug("joint_angles_outside_limits", joints=outside)
    return HandPose(
        palm=hand.palm_frame,
        joints=joints,
        joint_origins=origins,
        joint_axes=axes,
        tips=tips,
        out_of_limits=tuple(outside),
    )


def link_axis(hand: HandKinematics, pose: HandPose, link_id: str) -> FloatArray:
    """World direction of a link's long axis (towards the next joint or the fingertip)."""
    if link_id == PALM_LINK:
        return pose.palm[:3, :3] @ _LINK_X
    finger = hand.finger(hand.finger_of[link_id])
    ids = [j.id for j in finger.joints]
    pos = ids.index(link_id)
    if pos + 1 < len(ids):
        local = finger.joints[pos + 1].origin_offset[:3, 3]
    elif finger.tip_offset is not None:
        local = finger.tip_offset
    else:
        local = _LINK_X
    if float(np.linalg.norm(local)) == 0.0:
        local = _LINK_X
    direction = pose.joints[link_id][:3, :3] @ local
    return direction / np.linalg.norm(direction)


def resolve_contacts(
    hand: HandKinematics, pose: HandPose, contacts: Sequence[Contact]
) -> list[Contact]:
    """Give every contact without an explicit tangent its link's long axis."""
    resolved = []
    for contact in contacts:
        if contact.link_id != PALM_LINK and contact.link_id not in hand.joint_index:
            msg = f"contact attributed to unknown link {contact.link_id!r}"
            raise HandModelError(msg)
        if contact.tangent is None:
            contact = contact.with_tangent(link_axis(hand, pose, contact.link_id))
        resolved.append(contact)
    return resolved


def contact_jacobian(
    hand: HandKinematics,
    theta: Sequence[float] | FloatArray,
    contacts: Sequence[Contact],
    pose: HandPose | None = None,
) -> FloatArray:
    """Stacked 3n_c x n_q Jacobian in contact-frame axes (normal, tangent1, tangent2).

    Columns of joints that are not ancestors of a contact's link are exactly zero.
    Contacts without a tangent are resolved against their link's long axis.
    """
    pose = pose or forward_kinematics(hand, theta)
    resolved = resolve_contacts(hand, pose, contacts)
    J = np.zeros((3 * len(resolved), hand.n_joints))
    for k, contact in enumerate(resolved):
        frame = contact.frame
        for joint_id in hand.ancestors(contact.link_id):
            col = hand.joint_index[joint_id]
            v = np.cross(pose.joint_axes[joint_id], contact.position - pose.joint_origins[joint_id])
            J[3 * k : 3 * k + 3, col] = frame.T @ v
    return J
