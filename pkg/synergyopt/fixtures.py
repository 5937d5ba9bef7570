"""Bundled illustrative inputs.

None of these reproduce a measured hand or grasp dataset. They are small, exactly
analysable cases for tests and a plausibly dimensioned three-finger hand (a two-joint
thumb opposing two mirrored three-joint fingers) for end-to-end runs.
"""

from __future__ import annotations

import math
from typing import TYPE_CHECKING, Any

import numpy as np
import structlog

from synergyopt.constants import (
    MM,
    REFERENCE_HAND_PRELOAD_COUNT,
    REFERENCE_HAND_PRELOAD_RANGES,
    REFERENCE_HAND_RADIUS_RANGE_MM,
    REFERENCE_HAND_STIFFNESS_NMM,
)
from synergyopt.grasp.contacts import Contact
from synergyopt.grasp.matrices import GraspSample, contact_system
from synergyopt.hand.kinematics import forward_kinematics
from synergyopt.optimizer.force import feasible_start

if TYPE_CHECKING:
    from synergyopt.hand.model import HandKinematics

logger = structlog.get_logger(__name__)

_HALF_PI = math.pi / 2
_Z = np.array([0.0, 0.0, 1.0])


def _joint(
    joint_id: str,
    kind: str,
    axis: tuple[float, float, float],
    translation_mm: tuple[float, float, float] = (0.0, 0.0, 0.0),
    limits: tuple[float, float] = (0.0, _HALF_PI),
) -> dict[str, Any]:
    return {
        "id": joint_id,
        "axis_kind": kind,
        "axis": list(axis),
        "offset": {"translation_mm": list(translation_mm)},
        "limits_rad": list(limits),
    }


def _tendon(tendon_id: str, crossings: list[tuple[str, int]]) -> dict[str, Any]:
    return {"id": tendon_id, "crossings": [{"joint": j, "sign": s} for j, s in crossings]}


# --- three-finger reference hand ---

REFERENCE_JOINTS = ("tp", "td", "fr", "fp", "fd", "fr2", "fp2", "fd2")


def reference_hand_document() -> dict[str, Any]:
    """Thumb (tp, td) opposing mirrored fingers (fr, fp, fd) and (fr2, fp2, fd2).

    One tendon per finger; the first finger's roll is crossed with sign -1.
    """
    roll = (-_HALF_PI, _HALF_PI)
    return {
        "fingers": [
            {
                "name": "thumb",
                "joints": [
                    _joint("tp", "pitch", (-1.0, 0.0, 0.0), (0.0, -30.0, 0.0)),
                    _joint("td", "pitch", (-1.0, 0.0, 0.0), (0.0, 0.0, 45.0)),
                ],
                "tip_mm": [0.0, 0.0, 35.0],
            },
            {
                "name": "finger1",
                "joints": [
                    _joint("fr", "roll", (0.0, 0.0, 1.0), (-15.0, 30.0, 0.0), roll),
                    _joint("fp", "pitch", (1.0, 0.0, 0.0), (0.0, 0.0, 10.0)),
                    _joint("fd", "pitch", (1.0, 0.0, 0.0), (0.0, 0.0, 45.0)),
                ],
                "tip_mm": [0.0, 0.0, 35.0],
            },
            {
                "name": "finger2",
                "joints": [
                    _joint("fr2", "roll", (0.0, 0.0, 1.0), (15.0, 30.0, 0.0), roll),
                    _joint("fp2", "pitch", (1.0, 0.0, 0.0), (0.0, 0.0, 10.0)),
                    _joint("fd2", "pitch", (1.0, 0.0, 0.0), (0.0, 0.0, 45.0)),
                ],
                "tip_mm": [0.0, 0.0, 35.0],
            },
        ],
        "tendons": [
            _tendon("thumb_flexor", [("tp", 1), ("td", 1)]),
            _tendon("finger1_flexor", [("fr", -1), ("fp", 1), ("fd", 1)]),
            _tendon("finger2_flexor", [("fr2", 1), ("fp2", 1), ("fd2", 1)]),
        ],
        "mirror_groups": [["fr", "fr2"], ["fp", "fp2"], ["fd", "fd2"]],
    }


def reference_force_grid_document() -> dict[str, Any]:
    """Radii 2-12 mm in 0.5 mm steps; proximal pulleys pinned at 12 mm (21³ combos)."""
    lo, hi, step = REFERENCE_HAND_RADIUS_RANGE_MM
    axis = {"min_mm": lo, "max_mm": hi, "step_mm": step}
    return {
        "parameters": {"r_td": dict(axis), "r_fr": dict(axis), "r_fd": dict(axis)},
        "fixed": {"r_tp_mm": hi, "r_fp_mm": hi},
    }


def reference_kinematic_grid_document() -> dict[str, Any]:
    """Catalog stiffnesses, preloads in 30 inclusive steps; proximal springs pinned."""
    catalog = list(REFERENCE_HAND_STIFFNESS_NMM)
    stiffest = max(catalog)

    def preload(kind: str) -> dict[str, Any]:
        lo, hi = REFERENCE_HAND_PRELOAD_RANGES[kind]
        return {"min_rad": lo, "max_rad": hi, "count": REFERENCE_HAND_PRELOAD_COUNT}

    return {
        "parameters": {
            "K_td": {"values_nmm_per_rad": catalog},
            "theta0_tp": preload("proximal"),
            "theta0_td": preload("distal"),
            "K_fr": {"values_nmm_per_rad": catalog},
            "K_fd": {"values_nmm_per_rad": catalog},
            "theta0_fr": preload("roll"),
            "theta0_fp": preload("proximal"),
            "theta0_fd": preload("distal"),
        },
        "fixed": {"K_tp_nmm_per_rad": stiffest, "K_fp_nmm_per_rad": stiffest},
    }


def synthetic_grasps(
    hand: HandKinematics,
    count: int,
    *,
    seed: int = 0,
    mu: float = 0.5,
    edges: int = 8,
    max_attempts: int = 1000,
) -> list[GraspSample]:
    """Random fingertip grasps whose contact constraints admit an equilibrium.

    Angles are drawn inside the joint limits, every fingertip touches an object centred
    on the fingertips' centroid and pushes toward that centre.
    """
    rng = np.random.default_rng(seed)
    lower = np.array([j.angle_limits[0] for j in hand.joints])
    upper = np.array([j.angle_limits[1] for j in hand.joints])
    lo = lower + 0.15 * (upper - lower)
    hi = lower + 0.75 * (upper - lower)
    grasps: list[GraspSample] = []
    for _ in range(max_attempts):
        if len(grasps) == count:
            break
        theta = rng.uniform(lo, hi)
        pose = forward_kinematics(hand, theta)
        tips = {f.name: pose.tips[f.name] for f in hand.fingers}
        center = np.mean(list(tips.values()), axis=0)
        contacts = []
        for finger in hand.fingers:
            inward = center - tips[finger.name]
            if float(np.linalg.norm(inward)) < 1e-9:
                break
            contacts.append(
                Contact(
                    link_id=finger.joints[-1].id,
                    position=tips[finger.name],
                    normal=inward / np.linalg.norm(inward),
                    mu=mu,
                    m_edges=edges,
                )
            )
        else:
            object_pose = np.eye(4)
            object_pose[:3, 3] = center
            grasp = GraspSample(
                name=f"synthetic_{len(grasps):03d}",
                theta=theta,
                object_pose=object_pose,
                contacts=tuple(contacts),
            )
            if feasible_start(contact_system(hand, grasp)) is not None:
                grasps.append(grasp)
    if len(grasps) < count:
        logger.warning("synthetic_grasps_short", requested=count, produced=len(grasps))
    return grasps


def grasps_document(grasps: list[GraspSample]) -> dict[str, Any]:
    """Serialize grasp samples in the grasp-set document format."""
    out = []
    for g in grasps:
        entry: dict[str, Any] = {
            "name": g.name,
            "theta_rad": [float(v) for v in g.theta],
            "open": g.is_open,
            "object_pose": {"position_m": [float(v) for v in g.object_pose[:3, 3]]},
            "contacts": [
                {
                    "link": c.link_id,
                    "position_m": [float(v) for v in c.position],
                    "normal": [float(v) for v in c.normal],
                    "mu": c.mu,
                    "edges": c.m_edges,
                }
                for c in g.contacts
            ],
        }
        if g.weight_given or g.weight != 1.0:
            entry["weight"] = g.weight
        out.append(entry)
    return {"grasps": out}


# --- planar single-joint fingers around an object at the origin ---


def _planar_finger(
    name: str, contact_mm: np.ndarray, normal: np.ndarray, lever_mm: float
) -> dict[str, Any]:
    """One joint about +z placed so the contact point moves along ``normal``."""
    arm = lever_mm * np.cross(normal, _Z)
    origin = contact_mm - arm
    return {
        "name": name,
        "joints": [
            _joint(name, "pitch", (0.0, 0.0, 1.0), tuple(origin), (-_HALF_PI, _HALF_PI))
        ],
        "tip_mm": [float(v) for v in arm],
    }


def _ring(radius_mm: float, angles_deg: tuple[float, ...]) -> list[tuple[np.ndarray, np.ndarray]]:
    points = []
    for deg in angles_deg:
        u = np.array([math.cos(math.radians(deg)), math.sin(math.radians(deg)), 0.0])
        points.append((radius_mm * u, -u))
    return points


def pinch_hand_document(
    levers_mm: tuple[float, float] = (20.0, 20.0),
    radius_mm: float = 20.0,
    crossings: tuple[str, ...] = ("a", "b"),
) -> dict[str, Any]:
    """Two opposed one-joint fingers ``a`` (at -x) and ``b`` (at +x) on one tendon."""
    ring = _ring(radius_mm, (180.0, 0.0))
    return {
        "fingers": [
            _planar_finger(name, p, n, lever)
            for name, (p, n), lever in zip(("a", "b"), ring, levers_mm, strict=True)
        ],
        "tendons": [_tendon("flexor", [(j, 1) for j in crossings])],
    }


def pinch_grasps_document(radius_mm: float = 20.0, mu: float = 0.5) -> dict[str, Any]:
    ring = _ring(radius_mm, (180.0, 0.0))
    return {
        "grasps": [
            {
                "name": "pinch",
                "theta_rad": [0.0, 0.0],
                "contacts": [
                    {
                        "link": name,
                        "position_m": [float(v) * MM for v in p],
                        "normal": [float(v) for v in n],
                        "mu": mu,
                        "edges": 8,
                    }
                    for name, (p, n) in zip(("a", "b"), ring, strict=True)
                ],
            }
        ]
    }


def pinch_force_grid_document() -> dict[str, Any]:
    axis = {"min_mm": 1.0, "max_mm": 5.0, "step_mm": 1.0}
    return {"parameters": {"r_a": dict(axis), "r_b": dict(axis)}}


TRIPOD_ANGLES_DEG = (90.0, 210.0, 330.0)


def tripod_hand_document(
    levers_mm: tuple[float, float, float] = (60.0, 20.0, 20.0), radius_mm: float = 20.0
) -> dict[str, Any]:
    """Three one-joint fingers at 120° around a sphere, all on one flexor tendon."""
    ring = _ring(radius_mm, TRIPOD_ANGLES_DEG)
    return {
        "fingers": [
            _planar_finger(name, p, n, lever)
            for name, (p, n), lever in zip(("a", "b", "c"), ring, levers_mm, strict=True)
        ],
        "tendons": [_tendon("flexor", [("a", 1), ("b", 1), ("c", 1)])],
    }


def tripod_grasps_document(radius_mm: float = 20.0, mu: float = 0.3) -> dict[str, Any]:
    """The closing grasp plus contact-free poses for the kinematic phase."""
    ring = _ring(radius_mm, TRIPOD_ANGLES_DEG)
    return {
        "grasps": [
            {
                "name": "tripod",
                "theta_rad": [0.0, 0.0, 0.0],
                "contacts": [
                    {
                        "link": name,
                        "position_m": [float(v) * MM for v in p],
                        "normal": [float(v) for v in n],
                        "mu": mu,
                        "edges": 8,
                    }
                    for name, (p, n) in zip(("a", "b", "c"), ring, strict=True)
                ],
            },
            {"name": "open", "theta_rad": [0.0, 0.0, 0.0], "open": True},
            {"name": "half_closed", "theta_rad": [0.2, 0.4, 0.4]},
        ]
    }


def tripod_force_grid_document() -> dict[str, Any]:
    axis = {"min_mm": 1.0, "max_mm": 5.0, "step_mm": 1.0}
    return {"parameters": {"r_a": dict(axis), "r_b": dict(axis), "r_c": dict(axis)}}


def tripod_kinematic_grid_document() -> dict[str, Any]:
    catalog = {"values_nmm_per_rad": [1.0, 2.0, 4.0]}
    preload = {"values_rad": [0.0, 0.5, 1.0]}
    return {
        "parameters": {
            "K_a": dict(catalog),
            "K_b": dict(catalog),
            "K_c": dict(catalog),
            "theta0_a": dict(preload),
            "theta0_b": dict(preload),
            "theta0_c": dict(preload),
        }
    }


# --- two-joint finger for the kinematic phase ---


def two_joint_finger_document() -> dict[str, Any]:
    limits = (-0.5, 2.5)
    return {
        "fingers": [
            {
                "name": "f",
                "joints": [
                    _joint("j1", "pitch", (1.0, 0.0, 0.0), limits=limits),
                    _joint("j2", "pitch", (1.0, 0.0, 0.0), (0.0, 0.0, 40.0), limits),
                ],
                "tip_mm": [0.0, 0.0, 30.0],
            }
        ],
        "tendons": [_tendon("flexor", [("j1", 1), ("j2", 1)])],
    }


# r* of (10, 5) mm with K = (2, 1) N·mm/rad and θ0 = (1, 0) rad puts these on the manifold.
TWO_JOINT_R_STAR = {"j1": 10.0 * MM, "j2": 5.0 * MM}
TWO_JOINT_POSES = {"p1": (0.0, 1.0), "p2": (0.5, 1.5), "p3": (1.0, 2.0)}


def two_joint_poses_document() -> dict[str, Any]:
    return {
        "grasps": [{"name": n, "theta_rad": list(theta)} for n, theta in TWO_JOINT_POSES.items()]
    }


def two_joint_grid_document() -> dict[str, Any]:
    catalog = {"values_nmm_per_rad": [1.0, 2.0, 4.0]}
    preload = {"values_rad": [0.0, 1.0, 2.0]}
    return {
        "parameters": {
            "K_j1": dict(catalog),
            "K_j2": dict(catalog),
            "theta0_j1": dict(preload),
            "theta0_j2": dict(preload),
        }
    }
