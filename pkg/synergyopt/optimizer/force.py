"""Grasping-phase stability metric and the exhaustive moment-arm search."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
import structlog

from synergyopt.constants import (
    DEFAULT_CHUNK_SIZE,
    DEFAULT_QP_MAX_ITER,
    DEFAULT_QP_TOL,
    TORQUE_SUM,
)
from synergyopt.exceptions import GraspModelError, GridError, InfeasibleSearchError
from synergyopt.grasp.matrices import (
    GraspMatrices,
    StabilityResult,
    actuation_matrix,
    contact_system,
)
from synergyopt.models.reports import (
    ComponentResult,
    OptimizationReport,
    SearchTiming,
    TraceRow,
    finite_or_none,
)
from synergyopt.optimizer.search import run_search, weighted_norm
from synergyopt.solver import QuadraticProgram, solve_qp
from synergyopt.solver.qp import phase_one
from synergyopt.types import FloatArray, ParamKind, Phase, QpStatus
from synergyopt.utils.timing import timed

if TYPE_CHECKING:
    from collections.abc import Sequence

    from synergyopt.grasp.matrices import GraspSample
    from synergyopt.hand.model import HandKinematics
    from synergyopt.optimizer.grid import Combo, ParameterGrid

logger = structlog.get_logger(__name__)

_USABLE = (QpStatus.OPTIMAL, QpStatus.INACCURATE)


def stability_qp(m: GraspMatrices) -> QuadraticProgram:
    """QP over x = [β; t_net] minimizing ‖JᵀDβ − A t_net‖².

    Constraints: zero object wrench, friction rows, unit total joint torque, x ≥ 0.
    """
    n_beta, n_t = m.n_beta, m.n_t
    torque = m.torque_map
    Q = np.hstack([torque, -m.A])
    zeros_t = np.zeros((6, n_t))
    A_eq = np.vstack(
        [
            np.hstack([m.wrench_map, zeros_t]),
            np.concatenate([torque.sum(axis=0), np.zeros(n_t)])[None, :],
        ]
    )
    b_eq = np.concatenate([np.zeros(6), [TORQUE_SUM]])
    A_in = np.hstack([m.F, np.zeros((m.F.shape[0], n_t))])
    return QuadraticProgram.build(
        2.0 * Q.T @ Q,
        A_eq=A_eq,
        b_eq=b_eq,
        A_in=A_in,
        b_in=np.zeros(A_in.shape[0]),
        lb=np.zeros(n_beta + n_t),
    )


def feasible_start(m: GraspMatrices, *, tol: float = DEFAULT_QP_TOL) -> FloatArray | None:
    """A feasible [β; 0] for the grasp, or None when the constraints cannot be met.

    The constraints do not involve A, so one point serves every moment-arm combination.
    """
    qp = stability_qp(m)
    x, violation = phase_one(qp)
    if violation > tol * (1.0 + TORQUE_SUM):
        return None
    x = np.maximum(x, 0.0)
    x[m.n_beta :] = 0.0
    return x


def grasp_stability_metric(
    m: GraspMatrices,
    *,
    tol: float = DEFAULT_QP_TOL,
    max_iter: int = DEFAULT_QP_MAX_ITER,
    x0: FloatArray | None = None,
) -> StabilityResult:
    """Minimum unbalanced joint torque norm once contact is made."""
    if m.n_c < 1:
        msg = f"grasp {m.grasp_name} has no contacts"
        raise GraspModelError(msg)
    solution = solve_qp(stability_qp(m), tol=tol, max_iter=max_iter, x0=x0)
    if solution.status not in _USABLE:
        if solution.status != QpStatus.INFEASIBLE:
            logger.warning(
                "stability_qp_failed", grasp=m.grasp_name, status=solution.status.value
            )
        return StabilityResult.infeasible(m.grasp_name)
    beta = solution.x[: m.n_beta]
    t_net = solution.x[m.n_beta :]
    delta_tau = m.torque_map @ beta - m.A @ t_net
    return StabilityResult(
        grasp_name=m.grasp_name,
        beta=beta,
        t_net=t_net,
        delta_tau=delta_tau,
        q=float(np.linalg.norm(delta_tau)),
    )


@dataclass(frozen=True, eq=False)
class ForceEvaluator:
    """Per-grasp q for one moment-arm combination."""

    hand: HandKinematics
    grid: ParameterGrid
    systems: tuple[GraspMatrices, ...]
    starts: tuple[FloatArray | None, ...]
    tol: float = DEFAULT_QP_TOL
    max_iter: int = DEFAULT_QP_MAX_ITER

    def __call__(self, combo: Combo) -> tuple[float, ...]:
        A = actuation_matrix(self.hand, self.grid.to_params(self.hand, combo).r)
        qs = []
        for system, start in zip(self.systems, self.starts, strict=True):
            if start is None:
                qs.append(math.inf)
                continue
            x0 = np.concatenate([start[: system.n_beta], np.zeros(A.shape[1])])
            result = grasp_stability_metric(
                system.with_actuation(A), tol=self.tol, max_iter=self.max_iter, x0=x0
            )
            qs.append(result.q)
        return tuple(qs)


def _check_coverage(hand: HandKinematics, grid: ParameterGrid) -> None:
    covered = set(grid.to_params(hand, grid.baseline()).r)
    missing = [j for j in hand.crossed_joints() if j not in covered]
    if missing:
        msg = f"grid leaves moment arms unset for joints {missing}"
        raise GridError(msg)


def force_optimize(
    hand: HandKinematics,
    grasps: Sequence[GraspSample],
    grid: ParameterGrid,
    *,
    threads: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    tol: float = DEFAULT_QP_TOL,
    max_iter: int = DEFAULT_QP_MAX_ITER,
    trace: bool = False,
) -> OptimizationReport:
    """Search every moment-arm combination for the minimum weighted Q over all grasps."""
    grid = grid.bind(hand, [ParamKind.MOMENT_ARM])
    _check_coverage(hand, grid)
    contact_grasps = [g for g in grasps if g.contacts]
    skipped = [g.name for g in grasps if not g.contacts]
    if skipped:
        logger.info("force_phase_skips_contactless", poses=skipped)
    if not contact_grasps:
        msg = "force optimization needs at least one grasp with contacts"
        raise GraspModelError(msg)

    systems = tuple(contact_system(hand, g) for g in contact_grasps)
    starts = tuple(feasible_start(m, tol=tol) for m in systems)
    for g, start in zip(contact_grasps, starts, strict=True):
        if start is None:
            logger.warning("grasp_constraints_infeasible", grasp=g.name)
    names = [g.name for g in contact_grasps]
    weights = [g.weight for g in contact_grasps]
    evaluator = ForceEvaluator(hand, grid, systems, starts, tol=tol, max_iter=max_iter)

    logger.info("force_search_started", combos=grid.size, grasps=len(systems), threads=threads)
    with timed("force_search", items=grid.size) as clock:
        outcome = run_search(
            evaluator, grid, weights, threads=threads, chunk_size=chunk_size, trace=trace
        )
    if outcome.best is None:
        blocking = [names[i] for i, _ in outcome.blocked_by.most_common()]
        msg = "no moment-arm combination is feasible for every grasp"
        raise InfeasibleSearchError(msg, blocking_grasps=blocking)
    best = outcome.best

    baseline = grid.baseline()
    baseline_qs = evaluator(baseline)
    baseline_q = weighted_norm(baseline_qs, weights)
    params = grid.to_params(hand, best.combo)
    logger.info(
        "force_search_complete",
        combos=outcome.evaluated,
        best_q=best.q,
        baseline_q=baseline_q,
        skipped_infeasible=outcome.infeasible,
    )
    return OptimizationReport(
        phase=Phase.FORCE,
        parameters=list(grid.names),
        best_combo=grid.label(best.combo),
        best_params={ParamKind.MOMENT_ARM.value: dict(params.r)},
        best_q=best.q,
        per_grasp_q={n: finite_or_none(q) for n, q in zip(names, best.per_sample, strict=True)},
        weights=dict(zip(names, weights, strict=True)),
        baseline_combo=grid.label(baseline),
        baseline_q=finite_or_none(baseline_q),
        baseline_per_grasp_q={
            n: finite_or_none(q) for n, q in zip(names, baseline_qs, strict=True)
        },
        combos_evaluated=outcome.evaluated,
        combos_total=grid.size,
        skipped_infeasible=outcome.infeasible,
        components=[
            ComponentResult(
                name="hand",
                fingers=[f.name for f in hand.fingers],
                parameters=list(grid.names),
                combos=grid.size,
                best_q=best.q,
                skipped_infeasible=outcome.infeasible,
            )
        ],
        trace=(
            [
                TraceRow(
                    component="hand",
                    index=ev.index,
                    combo=grid.label(ev.combo),
                    q=finite_or_none(ev.q),
                )
                for ev in outcome.trace
            ]
            if trace
            else None
        ),
        timing=SearchTiming(
            wall_seconds=clock["elapsed"], combos_per_second=clock["rate"], threads=threads
        ),
    )
