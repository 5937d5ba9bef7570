"""Pre-contact stability metric and the stiffness / preload search.

Fingers that share no tendon and no parameter key move independently before contact,
so their parameter blocks are searched separately and the results merged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
import structlog

from synergyopt.constants import DEFAULT_CHUNK_SIZE, DEFAULT_OPEN_POSE_WEIGHT
from synergyopt.exceptions import GridError, HandModelError, MissingInputError
from synergyopt.grasp.matrices import actuation_matrix
from synergyopt.hand.model import ActuationParams
from synergyopt.models.reports import (
    ComponentResult,
    OptimizationReport,
    SearchTiming,
    TraceRow,
    finite_or_none,
)
from synergyopt.optimizer.search import run_search, weighted_norm
from synergyopt.solver import NnlsResult, solve_nnls
from synergyopt.types import FloatArray, ParamKind, Phase
from synergyopt.utils.timing import timed

if TYPE_CHECKING:
    from collections.abc import Mapping, Sequence

    from synergyopt.grasp.matrices import GraspSample
    from synergyopt.hand.model import HandKinematics
    from synergyopt.optimizer.grid import Combo, ParameterGrid

logger = structlog.get_logger(__name__)


@dataclass(frozen=True, eq=False)
class PreContactSystem:
    R: FloatArray  # n_q x n_t moment-arm map
    tau_s: FloatArray  # spring torques
    pose_name: str = ""
    weight: float = 1.0


def spring_torque(
    K: Mapping[str, float],
    theta: Sequence[float] | FloatArray,
    theta0: Mapping[str, float],
    joint_ids: Sequence[str],
) -> FloatArray:
    """τ_s[j] = K_j (θ_j + θ0_j), ordered like ``joint_ids``."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (len(joint_ids),):
        msg = f"theta has shape {theta.shape}, expected ({len(joint_ids)},)"
        raise HandModelError(msg)
    missing = [j for j in joint_ids if j not in K or j not in theta0]
    if missing:
        msg = f"stiffness or preload missing for joints {missing}"
        raise HandModelError(msg)
    stiffness = np.array([K[j] for j in joint_ids])
    preload = np.array([theta0[j] for j in joint_ids])
    return stiffness * (theta + preload)


def precontact_stability_metric(system: PreContactSystem) -> NnlsResult:
    """Net tensions t ≥ 0 best balancing the springs; residual is q = ‖Δτ_b‖."""
    return solve_nnls(system.R, system.tau_s)


def precontact_matrix(
    hand: HandKinematics, r_star: Mapping[str, float], theta: FloatArray
) -> FloatArray:
    """Moment-arm map at a pose. Pulleys are configuration independent, so this is A(r*)."""
    del theta
    return actuation_matrix(hand, r_star)


def pose_weights(poses: Sequence[GraspSample], open_pose_weight: float) -> list[float]:
    """Document weights, with ``open_pose_weight`` for open poses that set none."""
    weights: list[float] = []
    for p in poses:
        if p.is_open and not p.weight_given:
            weights.append(open_pose_weight)
            continue
        if p.is_open:
            logger.info("open_pose_weight_from_document", pose=p.name, weight=p.weight)
        weights.append(p.weight)
    if not any(p.is_open for p in poses):
        logger.warning("open_pose_missing", poses=len(poses))
    return weights


@dataclass(frozen=True, eq=False)
class Component:
    """Fingers searched together, with the joint rows and tendon columns they own."""

    fingers: tuple[str, ...]
    joint_ids: tuple[str, ...]
    rows: tuple[int, ...]
    columns: tuple[int, ...]

    @property
    def name(self) -> str:
        return "+".join(self.fingers)


def finger_components(hand: HandKinematics) -> list[Component]:
    """Group fingers linked by a shared tendon or a shared parameter key."""
    parent = {f.name: f.name for f in hand.fingers}

    def find(name: str) -> str:
        while parent[name] != name:
            parent[name] = parent[parent[name]]
            name = parent[name]
        return name

    def union(a: str, b: str) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    links = [t.joint_ids for t in hand.tendons] + list(hand.parameter_keys.values())
    for joint_ids in links:
        fingers = [hand.finger_of[j] for j in joint_ids]
        for other in fingers[1:]:
            union(fingers[0], other)

    order = [f.name for f in hand.fingers]
    groups: dict[str, list[str]] = {}
    for name in order:
        groups.setdefault(find(name), []).append(name)

    components = []
    for fingers in groups.values():
        members = set(fingers)
        joint_ids = tuple(j for j in hand.joint_ids if hand.finger_of[j] in members)
        columns = tuple(
            t
            for t, tendon in enumerate(hand.tendons)
            if hand.finger_of[tendon.joint_ids[0]] in members
        )
        components.append(
            Component(
                fingers=tuple(fingers),
                joint_ids=joint_ids,
                rows=tuple(hand.joint_index[j] for j in joint_ids),
                columns=columns,
            )
        )
    return components


def whole_hand(hand: HandKinematics) -> Component:
    return Component(
        fingers=tuple(f.name for f in hand.fingers),
        joint_ids=hand.joint_ids,
        rows=tuple(range(hand.n_joints)),
        columns=tuple(range(len(hand.tendons))),
    )


@dataclass(frozen=True, eq=False)
class PrecontactEvaluator:
    """Per-pose q for one stiffness / preload combination within a component."""

    hand: HandKinematics
    grid: ParameterGrid
    joint_ids: tuple[str, ...]
    thetas: tuple[FloatArray, ...]  # component joint angles per pose
    matrices: tuple[FloatArray, ...]  # component R per pose

    def systems(self, combo: Combo) -> list[PreContactSystem]:
        params = self.grid.to_params(self.hand, combo)
        return [
            PreContactSystem(
                R=R, tau_s=spring_torque(params.K, theta, params.theta0, self.joint_ids)
            )
            for theta, R in zip(self.thetas, self.matrices, strict=True)
        ]

    def __call__(self, combo: Combo) -> tuple[float, ...]:
        return tuple(precontact_stability_metric(s).residual for s in self.systems(combo))


def _component_evaluator(
    hand: HandKinematics,
    grid: ParameterGrid,
    component: Component,
    poses: Sequence[GraspSample],
    r_star: Mapping[str, float],
) -> PrecontactEvaluator:
    rows = list(component.rows)
    cols = list(component.columns)
    return PrecontactEvaluator(
        hand=hand,
        grid=grid,
        joint_ids=component.joint_ids,
        thetas=tuple(np.asarray(p.theta, dtype=float)[rows] for p in poses),
        matrices=tuple(
            precontact_matrix(hand, r_star, p.theta)[np.ix_(rows, cols)] for p in poses
        ),
    )


def _check_coverage(hand: HandKinematics, grid: ParameterGrid) -> None:
    params = grid.to_params(hand, grid.baseline())
    missing = [j for j in hand.joint_ids if j not in params.K or j not in params.theta0]
    if missing:
        msg = f"grid leaves stiffness or preload unset for joints {missing}"
        raise GridError(msg)


def _axes_of(hand: HandKinematics, grid: ParameterGrid, component: Component) -> list[str]:
    members = set(component.fingers)
    return [a.name for a in grid.axes if hand.finger_of[a.key] in members]


def kinematic_optimize(
    hand: HandKinematics,
    poses: Sequence[GraspSample],
    grid: ParameterGrid,
    r_star: Mapping[str, float],
    *,
    open_pose_weight: float = DEFAULT_OPEN_POSE_WEIGHT,
    decompose: bool = True,
    threads: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    trace: bool = False,
) -> OptimizationReport:
    """Search stiffnesses and preloads so the closing motion passes near every pose."""
    if not poses:
        msg = "kinematic optimization needs at least one pose"
        raise GridError(msg)
    grid = grid.bind(hand, [ParamKind.STIFFNESS, ParamKind.PRELOAD])
    if not grid.axes:
        msg = "kinematic grid has no free parameters"
        raise GridError(msg)
    missing = [j for j in hand.crossed_joints() if j not in r_star]
    if missing:
        msg = f"moment arms r* missing for joints {missing}"
        raise MissingInputError(msg)
    ActuationParams(r=r_star).validate_for(hand)
    _check_coverage(hand, grid)
    for axis in grid.axes:
        if axis.kind == ParamKind.STIFFNESS and not axis.explicit:
            logger.warning("stiffness_axis_not_a_value_list", parameter=axis.name)

    names = [p.name for p in poses]
    weights = pose_weights(poses, open_pose_weight)
    components = finger_components(hand) if decompose else [whole_hand(hand)]

    per_pose_sq = np.zeros(len(poses))
    baseline_sq = np.zeros(len(poses))
    best_combo: dict[str, float] = {}
    results: list[ComponentResult] = []
    trace_rows: list[TraceRow] = []
    evaluated = infeasible = 0
    baseline = grid.label(grid.baseline())

    logger.info(
        "kinematic_search_started",
        components=[c.name for c in components],
        poses=len(poses),
        threads=threads,
    )
    total = sum(grid.subgrid(_axes_of(hand, grid, c)).size for c in components)
    with timed("kinematic_search", items=total) as clock:
        for component in components:
            sub = grid.subgrid(_axes_of(hand, grid, component))
            evaluator = _component_evaluator(hand, sub, component, poses, r_star)
            outcome = run_search(
                evaluator, sub, weights, threads=threads, chunk_size=chunk_size, trace=trace
            )
            evaluated += outcome.evaluated
            infeasible += outcome.infeasible
            if outcome.best is None:
                msg = f"no feasible combination for fingers {component.name}"
                raise GridError(msg)
            best_combo.update(sub.label(outcome.best.combo))
            per_pose_sq += np.square(outcome.best.per_sample)
            baseline_sq += np.square(evaluator(tuple(baseline[n] for n in sub.names)))
            results.append(
                ComponentResult(
                    name=component.name,
                    fingers=list(component.fingers),
                    parameters=list(sub.names),
                    combos=sub.size,
                    best_q=outcome.best.q,
                    skipped_infeasible=outcome.infeasible,
                )
            )
            trace_rows.extend(
                TraceRow(
                    component=component.name,
                    index=ev.index,
                    combo=sub.label(ev.combo),
                    q=finite_or_none(ev.q),
                )
                for ev in outcome.trace
            )
            logger.debug("component_searched", component=component.name, best_q=outcome.best.q)

    per_pose = [math.sqrt(v) for v in per_pose_sq]
    baseline_per_pose = [math.sqrt(v) for v in baseline_sq]
    best_q = weighted_norm(per_pose, weights)
    baseline_q = weighted_norm(baseline_per_pose, weights)
    ordered = {n: best_combo[n] for n in grid.names}
    params = grid.to_params(hand, tuple(ordered.values()))
    params.validate_for(hand, grid.preload_bounds(hand))
    logger.info(
        "kinematic_search_complete", combos=evaluated, best_q=best_q, baseline_q=baseline_q
    )
    return OptimizationReport(
        phase=Phase.KINEMATIC,
        parameters=list(grid.names),
        best_combo=ordered,
        best_params={
            ParamKind.MOMENT_ARM.value: {j: float(r_star[j]) for j in hand.crossed_joints()},
            ParamKind.STIFFNESS.value: dict(params.K),
            ParamKind.PRELOAD.value: dict(params.theta0),
        },
        best_q=best_q,
        per_grasp_q=dict(zip(names, per_pose, strict=True)),
        weights=dict(zip(names, weights, strict=True)),
        baseline_combo=baseline,
        baseline_q=baseline_q,
        baseline_per_grasp_q=dict(zip(names, baseline_per_pose, strict=True)),
        combos_evaluated=evaluated,
        combos_total=total,
        skipped_infeasible=infeasible,
        components=results,
        trace=trace_rows if trace else None,
        timing=SearchTiming(
            wall_seconds=clock["elapsed"], combos_per_second=clock["rate"], threads=threads
        ),
    )
