"""Manifold vs. principal-component comparison and phase-improvement summary."""

from __future__ import annotations

from typing import TYPE_CHECKING, Any

import structlog

from synergyopt.analysis.manifold import derive_mrm, mrm_alignment, mrm_distance
from synergyopt.analysis.pca import PCAResult, pca_grasps
from synergyopt.exceptions import AnalysisError
from synergyopt.models.reports import (
    ComparisonReport,
    DistanceRow,
    ManifoldEntry,
    PhaseComparison,
    reduction_pct,
)

if TYPE_CHECKING:
    from collections.abc import Sequence

    from synergyopt.grasp.matrices import GraspSample
    from synergyopt.hand.model import ActuationParams, HandKinematics
    from synergyopt.models.reports import OptimizationReport

logger = structlog.get_logger(__name__)


def _phase(report: OptimizationReport | None) -> PhaseComparison | None:
    if report is None:
        return None
    return PhaseComparison(
        baseline_q=report.baseline_q,
        optimized_q=report.best_q,
        reduction_pct=reduction_pct(report.baseline_q, report.best_q),
    )


def build_comparison_report(
    hand: HandKinematics,
    params: ActuationParams,
    poses: Sequence[GraspSample],
    *,
    force_report: OptimizationReport | None = None,
    kin_report: OptimizationReport | None = None,
    whole_hand_pca: bool = False,
) -> ComparisonReport:
    """Per-finger manifold, first principal component and pose distances."""
    report = ComparisonReport(force=_phase(force_report), kinematic=_phase(kin_report))
    for finger in hand.fingers:
        try:
            manifold = derive_mrm(hand, params, finger.name)
        except AnalysisError as e:
            logger.info("finger_manifold_unsupported", finger=finger.name, reason=str(e))
            report.unsupported_fingers.append(finger.name)
            continue
        if not manifold.reachable:
            report.unreachable_fingers.append(finger.name)

        indices = [hand.joint_index[j] for j in manifold.joint_ids]
        pca: PCAResult | None = None
        if len(poses) >= 2:
            pca = pca_grasps(poses, indices)
        report.manifolds.append(
            ManifoldEntry(
                finger=finger.name,
                joint_ids=list(manifold.joint_ids),
                direction=manifold.direction.tolist(),
                offset=manifold.offset.tolist(),
                t_range=manifold.parameter_range,
                pca_mean=None if pca is None else pca.mean.tolist(),
                pca_component=None if pca is None else pca.components[0].tolist(),
                pca_explained_variance=[] if pca is None else pca.explained_variance.tolist(),
                alignment=None if pca is None else mrm_alignment(manifold, pca),
            )
        )
        for pose in poses:
            report.distances.append(
                DistanceRow(
                    pose=pose.name,
                    finger=finger.name,
                    distance_rad=mrm_distance(manifold, pose.theta[indices]),
                )
            )

    if whole_hand_pca and len(poses) >= 2:
        report.whole_hand_pca = pca_grasps(poses).components.tolist()
    logger.info(
        "comparison_built",
        manifolds=len(report.manifolds),
        unsupported=report.unsupported_fingers,
        unreachable=report.unreachable_fingers,
    )
    return report


def mrm_vs_pca_rows(report: ComparisonReport) -> list[dict[str, Any]]:
    """Long-form rows, one per (finger, joint)."""
    rows = []
    for entry in report.manifolds:
        for k, joint_id in enumerate(entry.joint_ids):
            rows.append(
                {
                    "finger": entry.finger,
                    "joint": joint_id,
                    "mrm_direction": entry.direction[k],
                    "mrm_offset": entry.offset[k],
                    "pca_mean": None if entry.pca_mean is None else entry.pca_mean[k],
                    "pca_component": (
                        None if entry.pca_component is None else entry.pca_component[k]
                    ),
                }
            )
    return rows


def distance_rows(report: ComparisonReport) -> list[dict[str, Any]]:
    return [row.model_dump() for row in report.distances]
