"""Hand description: joints, finger chains, tendon routes and actuation parameters."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import TYPE_CHECKING

import numpy as np
import structlog

from synergyopt.constants import MM, UNIT_NORM_TOL
from synergyopt.exceptions import HandModelError, LinkageError
from synergyopt.hand.transforms import make_transform
from synergyopt.models.documents import HandDoc, load_document, parse_document
from synergyopt.types import AxisKind, FloatArray, ParamKind

if TYPE_CHECKING:
    from collections.abc import Iterable, Mapping
    from pathlib import Path
    from typing import Any

logger = structlog.get_logger(__name__)

PALM_LINK = "palm"


@dataclass(frozen=True, eq=False)
class Joint:
    """1-DOF revolute joint; its link carries the same id."""

    id: str
    axis_kind: AxisKind
    rotation_axis: FloatArray
    origin_offset: FloatArray  # 4x4, from the parent joint frame (or the palm)
    angle_limits: tuple[float, float]

    def __post_init__(self) -> None:
        if abs(float(np.linalg.norm(self.rotation_axis)) - 1.0) > UNIT_NORM_TOL:
            msg = f"joint {self.id}: rotation axis must have unit norm"
            raise HandModelError(msg)
        if not self.angle_limits[0] < self.angle_limits[1]:
            msg = f"joint {self.id}: angle limits must satisfy min < max"
            raise HandModelError(msg)


@dataclass(frozen=True)
class TendonRoute:
    tendon_id: str
    crossings: tuple[tuple[str, int], ...]  # (joint id, +1 flexion / -1)

    def __post_init__(self) -> None:
        if not self.crossings:
            msg = f"tendon {self.tendon_id} crosses no joint"
            raise LinkageError(msg)
        joints = [j for j, _ in self.crossings]
        if len(set(joints)) != len(joints):
            msg = f"tendon {self.tendon_id} crosses a joint more than once"
            raise LinkageError(msg)
        if any(sign not in (1, -1) for _, sign in self.crossings):
            msg = f"tendon {self.tendon_id}: crossing signs must be +1 or -1"
            raise LinkageError(msg)

    @property
    def joint_ids(self) -> tuple[str, ...]:
        return tuple(j for j, _ in self.crossings)


@dataclass(frozen=True, eq=False)
class Finger:
    """Serial chain rooted at the palm frame."""

    name: str
    joints: tuple[Joint, ...]
    tip_offset: FloatArray | None = None  # fingertip position in the last joint frame


@dataclass(frozen=True, eq=False)
class HandKinematics:
    fingers: tuple[Finger, ...]
    palm_frame: FloatArray
    tendons: tuple[TendonRoute, ...]
    mirror_groups: tuple[tuple[str, ...], ...] = ()

    def __post_init__(self) -> None:
        ids = [j.id for f in self.fingers for j in f.joints]
        if len(set(ids)) != len(ids):
            msg = "joint ids must be unique across the hand"
            raise LinkageError(msg)
        if PALM_LINK in ids:
            msg = f"'{PALM_LINK}' is reserved for the palm link"
            raise LinkageError(msg)
        known = set(ids)
        for tendon in self.tendons:
            for joint_id in tendon.joint_ids:
                if joint_id not in known:
                    msg = f"tendon {tendon.tendon_id} crosses unknown joint {joint_id!r}"
                    raise LinkageError(msg)
        seen: set[str] = set()
        for group in self.mirror_groups:
            for joint_id in group:
                if joint_id not in known:
                    msg = f"mirror group references unknown joint {joint_id!r}"
                    raise LinkageError(msg)
                if joint_id in seen:
                    msg = f"joint {joint_id!r} appears in more than one mirror group"
                    raise LinkageError(msg)
                seen.add(joint_id)

    @cached_property
    def joints(self) -> tuple[Joint, ...]:
        """All joints in finger order, root to tip; this order indexes every τ vector."""
        return tuple(j for f in self.fingers for j in f.joints)

    @cached_property
    def joint_ids(self) -> tuple[str, ...]:
        return tuple(j.id for j in self.joints)

    @cached_property
    def joint_index(self) -> dict[str, int]:
        return {j: i for i, j in enumerate(self.joint_ids)}

    @cached_property
    def finger_of(self) -> dict[str, str]:
        return {j.id: f.name for f in self.fingers for j in f.joints}

    @cached_property
    def tendon_ids(self) -> tuple[str, ...]:
        return tuple(t.tendon_id for t in self.tendons)

    @property
    def n_joints(self) -> int:
        return len(self.joint_ids)

    def finger(self, name: str) -> Finger:
        for f in self.fingers:
            if f.name == name:
                return f
        msg = f"unknown finger {name!r}"
        raise HandModelError(msg)

    def ancestors(self, link_id: str) -> tuple[str, ...]:
        """Joints whose motion moves ``link_id``, root first."""
        if link_id == PALM_LINK:
            return ()
        if link_id not in self.joint_index:
            msg = f"unknown link {link_id!r}"
            raise LinkageError(msg)
        chain = self.finger(self.finger_of[link_id]).joints
        ids = [j.id for j in chain]
        return tuple(ids[: ids.index(link_id) + 1])

    @cached_property
    def parameter_keys(self) -> dict[str, tuple[str, ...]]:
        """Parameter key -> joints it drives. Mirror groups share the key of their first id."""
        keys: dict[str, tuple[str, ...]] = {}
        grouped: set[str] = set()
        for group in self.mirror_groups:
            keys[group[0]] = tuple(group)
            grouped.update(group)
        for joint_id in self.joint_ids:
            if joint_id not in grouped:
                keys[joint_id] = (joint_id,)
        return keys

    @cached_property
    def key_of(self) -> dict[str, str]:
        return {j: key for key, joints in self.parameter_keys.items() for j in joints}

    def crossed_joints(self) -> tuple[str, ...]:
        crossed = {j for t in self.tendons for j in t.joint_ids}
        return tuple(j for j in self.joint_ids if j in crossed)

    def tendons_of_finger(self, name: str) -> tuple[TendonRoute, ...]:
        return tuple(
            t for t in self.tendons if any(self.finger_of[j] == name for j in t.joint_ids)
        )


@dataclass(frozen=True)
class ActuationParams:
    """Moment arms r (m), stiffnesses K (N·m/rad) and preload angles θ0 (rad) per joint.

    Any of the maps may be partial (the force phase only fixes ``r``).
    """

    r: Mapping[str, float] = field(default_factory=dict)
    K: Mapping[str, float] = field(default_factory=dict)
    theta0: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for name, values in (("r", self.r), ("K", self.K)):
            for joint_id, value in values.items():
                if not value > 0.0:
                    msg = f"{name}[{joint_id}] must be positive, got {value}"
                    raise HandModelError(msg)

    def by_kind(self, kind: ParamKind) -> Mapping[str, float]:
        return {ParamKind.MOMENT_ARM: self.r, ParamKind.STIFFNESS: self.K}.get(
            kind, self.theta0
        )

    def validate_for(
        self,
        hand: HandKinematics,
        preload_bounds: Mapping[str, tuple[float, float]] | None = None,
    ) -> None:
        """Check mirror-group equality and optional preload bounds against ``hand``."""
        for kind in ParamKind:
            values = self.by_kind(kind)
            for group in hand.mirror_groups:
                present = [values[j] for j in group if j in values]
                if present and any(v != present[0] for v in present):
                    msg = f"mirror group {list(group)} holds unequal {kind.value} values"
                    raise HandModelError(msg)
        for joint_id, (lo, hi) in (preload_bounds or {}).items():
            value = self.theta0.get(joint_id)
            if value is not None and not lo <= value <= hi:
                msg = f"theta0[{joint_id}]={value} outside preload bounds [{lo}, {hi}]"
                raise HandModelError(msg)

    @classmethod
    def from_keys(
        cls, hand: HandKinematics, assignments: Iterable[tuple[ParamKind, str, float]]
    ) -> ActuationParams:
        """Expand (kind, parameter key, value) triples to every joint the key drives."""
        maps: dict[ParamKind, dict[str, float]] = {k: {} for k in ParamKind}
        keys = hand.parameter_keys
        for kind, key, value in assignments:
            if key not in keys:
                msg = f"unknown parameter key {key!r}"
                raise HandModelError(msg)
            for joint_id in keys[key]:
                maps[kind][joint_id] = value
        return cls(
            r=maps[ParamKind.MOMENT_ARM],
            K=maps[ParamKind.STIFFNESS],
            theta0=maps[ParamKind.PRELOAD],
        )


def hand_from_document(doc: HandDoc) -> HandKinematics:
    """Build linked kinematics from a validated hand document (mm converted to m)."""
    fingers: list[Finger] = []
    for finger_doc in doc.fingers:
        joints = []
        for jd in finger_doc.joints:
            axis = np.asarray(jd.axis, dtype=float)
            joints.append(
                Joint(
                    id=jd.id,
                    axis_kind=jd.axis_kind,
                    rotation_axis=axis / np.linalg.norm(axis),
                    origin_offset=make_transform(
                        np.asarray(jd.offset.translation_mm) * MM, jd.offset.rpy_rad
                    ),
                    angle_limits=(float(jd.limits_rad[0]), float(jd.limits_rad[1])),
                )
            )
        tip = None if finger_doc.tip_mm is None else np.asarray(finger_doc.tip_mm) * MM
        fingers.append(Finger(name=finger_doc.name, joints=tuple(joints), tip_offset=tip))

    tendons = tuple(
        TendonRoute(
            tendon_id=td.id,
            crossings=tuple((c.joint, c.sign) for c in td.crossings),
        )
        for td in doc.tendons
    )
    hand = HandKinematics(
        fingers=tuple(fingers),
        palm_frame=make_transform(np.asarray(doc.palm.translation_mm) * MM, doc.palm.rpy_rad),
        tendons=tendons,
        mirror_groups=tuple(tuple(g) for g in doc.mirror_groups if g),
    )
    logger.debug(
        "hand_loaded",
        fingers=len(hand.fingers),
        joints=hand.n_joints,
        tendons=len(hand.tendons),
    )
    return hand


def load_hand(source: Path | dict[str, Any]) -> HandKinematics:
    """Load a hand description from a file path or an already-parsed mapping."""
    if isinstance(source, dict):
        doc = parse_document(HandDoc, source, source="hand")
    else:
        doc = load_document(HandDoc, source)
    return hand_from_document(doc)
