"""Command implementations: validate, force-opt, kin-opt, analyze and all.

Each command returns a process exit code; the force phase always runs before the
kinematic phase and hands over r* through ``force_report.json``.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import TYPE_CHECKING, Any

import structlog
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from synergyopt.analysis.closure import grasp_closure
from synergyopt.analysis.report import build_comparison_report, distance_rows, mrm_vs_pca_rows
from synergyopt.constants import (
    DEFAULT_CHUNK_SIZE,
    DEFAULT_CLOSURE_SUBDIVISIONS,
    DEFAULT_FRICTION_EDGES,
    DEFAULT_OPEN_POSE_WEIGHT,
    DEFAULT_QP_MAX_ITER,
    DEFAULT_QP_TOL,
    MM,
)
from synergyopt.exceptions import (
    ConfigError,
    DocumentError,
    GraspModelError,
    GridError,
    HandModelError,
    InfeasibleSearchError,
    LinkageError,
    MissingInputError,
    SynergyError,
)
from synergyopt.grasp.matrices import load_grasps
from synergyopt.hand.kinematics import forward_kinematics
from synergyopt.hand.model import ActuationParams, load_hand
from synergyopt.models.reports import (
    ClosureEntry,
    ComparisonReport,
    OptimizationReport,
    ValidationReport,
)
from synergyopt.optimizer.force import force_optimize
from synergyopt.optimizer.grid import load_grid
from synergyopt.optimizer.kinematic import kinematic_optimize
from synergyopt.storage.reports import (
    COMPARISON_REPORT,
    DISTANCES,
    FORCE_REPORT,
    FORCE_TRACE,
    KIN_REPORT,
    KIN_TRACE,
    MRM_VS_PCA,
    VALIDATION_REPORT,
    ReportStore,
)
from synergyopt.types import ExitCode, ParamKind
from synergyopt.utils.timing import timed

if TYPE_CHECKING:
    from collections.abc import Callable

    from synergyopt.config.settings import Settings
    from synergyopt.grasp.matrices import GraspSample
    from synergyopt.hand.model import HandKinematics

logger = structlog.get_logger(__name__)


class RunConfig(BaseModel):
    """Resolved configuration of one CLI invocation."""

    model_config = ConfigDict(frozen=True)

    hand_path: Path | None = None
    grasps_path: Path | None = None
    force_grid_path: Path | None = None
    kin_grid_path: Path | None = None
    output_dir: Path = Path("out")
    trace: bool = False
    threads: int = Field(default=0, ge=0)
    chunk_size: int = Field(default=DEFAULT_CHUNK_SIZE, ge=1)
    open_pose_weight: float = Field(default=DEFAULT_OPEN_POSE_WEIGHT, gt=0.0)
    qp_tol: float = Field(default=DEFAULT_QP_TOL, gt=0.0, le=1e-2)
    qp_max_iter: int = Field(default=DEFAULT_QP_MAX_ITER, ge=1)
    edges_default: int = Field(default=DEFAULT_FRICTION_EDGES, ge=3)
    closure_subdivisions: int = Field(default=DEFAULT_CLOSURE_SUBDIVISIONS, ge=0, le=5)
    skip_validate: bool = False
    r_star_mm: dict[str, float] = {}
    whole_hand_pca: bool = False
    decompose: bool = True

    @classmethod
    def from_settings(cls, settings: Settings, **overrides: Any) -> RunConfig:
        """Settings supply defaults; any override that is not None wins."""
        values: dict[str, Any] = {
            "threads": settings.threads,
            "chunk_size": settings.chunk_size,
            "open_pose_weight": settings.open_pose_weight,
            "qp_tol": settings.qp_tol,
            "qp_max_iter": settings.qp_max_iter,
            "edges_default": settings.edges_default,
            "closure_subdivisions": settings.closure_subdivisions,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        try:
            return cls(**values)
        except ValidationError as e:
            first = e.errors()[0]
            field = ".".join(str(p) for p in first["loc"])
            msg = f"invalid option {field}: {first['msg']}"
            raise ConfigError(msg) from e

    @property
    def worker_count(self) -> int:
        return self.threads if self.threads > 0 else (os.cpu_count() or 1)

    def provenance(self) -> dict[str, Any]:
        """Config embedded in reports; the worker count lives in the timing block."""
        return self.model_dump(mode="json", exclude={"threads"})


def _require(path: Path | None, what: str) -> Path:
    if path is None:
        msg = f"no {what} given"
        raise MissingInputError(msg)
    if not path.is_file():
        msg = f"{what} not found: {path}"
        raise MissingInputError(msg)
    return path


def _load_inputs(config: RunConfig) -> tuple[HandKinematics, list[GraspSample]]:
    hand = load_hand(_require(config.hand_path, "hand document"))
    grasps = load_grasps(
        _require(config.grasps_path, "grasp set"), hand, edges_default=config.edges_default
    )
    return hand, grasps


def _validation_report(config: RunConfig) -> ValidationReport:
    hand, grasps = _load_inputs(config)
    report = ValidationReport(
        hand_joints=hand.n_joints,
        hand_tendons=len(hand.tendons),
        grasps=len(grasps),
        config=config.provenance(),
    )
    for grasp in grasps:
        outside = forward_kinematics(hand, grasp.theta).out_of_limits
        if outside:
            logger.warning("pose_outside_joint_limits", grasp=grasp.name, joints=list(outside))
            report.out_of_limits[grasp.name] = list(outside)
        if not grasp.contacts:
            report.poses_without_contacts.append(grasp.name)
            continue
        closure = grasp_closure(hand, grasp, config.closure_subdivisions)
        report.closure.append(
            ClosureEntry(
                grasp=grasp.name,
                margin=closure.margin,
                force_margin=closure.force_margin,
                torque_margin=closure.torque_margin,
                is_closure=closure.is_closure,
                directions=closure.directions,
            )
        )
        if not closure.is_closure:
            report.failed.append(grasp.name)
    return report


def cmd_validate(config: RunConfig) -> int:
    report = _validation_report(config)
    ReportStore(config.output_dir).write_json(VALIDATION_REPORT, report)
    for entry in report.closure:
        print(f"{entry.grasp}: margin {entry.margin:.6g}")
    if not report.ok:
        logger.error("force_closure_failed", grasps=report.failed)
        print(f"force closure failed: {', '.join(report.failed)}")
        return ExitCode.CLOSURE
    logger.info("validation_passed", grasps=report.grasps)
    return ExitCode.OK


def _trace_rows(report: OptimizationReport) -> tuple[list[dict[str, Any]], list[str]]:
    rows: list[dict[str, Any]] = []
    for row in report.trace or []:
        rows.append({"component": row.component, "index": row.index, **row.combo, "q": row.q})
    fieldnames = ["component", "index", *report.parameters, "q"]
    return rows, fieldnames


def _write_search(store: ReportStore, report: OptimizationReport, name: str, trace: str) -> None:
    store.write_json(name, report)
    if report.trace is not None:
        rows, fieldnames = _trace_rows(report)
        store.write_csv(trace, rows, fieldnames)


def cmd_force_opt(config: RunConfig) -> int:
    if not config.skip_validate:
        status = cmd_validate(config)
        if status != ExitCode.OK:
            return status
    hand, grasps = _load_inputs(config)
    grid = load_grid(_require(config.force_grid_path, "force grid"))
    report = force_optimize(
        hand,
        grasps,
        grid,
        threads=config.worker_count,
        chunk_size=config.chunk_size,
        tol=config.qp_tol,
        max_iter=config.qp_max_iter,
        trace=config.trace,
    )
    report = report.model_copy(update={"config": config.provenance()})
    _write_search(ReportStore(config.output_dir), report, FORCE_REPORT, FORCE_TRACE)
    print(f"force: best {report.best_combo} Q={report.best_q:.6g} (baseline {report.baseline_q})")
    return ExitCode.OK


def _r_star(config: RunConfig, hand: HandKinematics, store: ReportStore) -> dict[str, float]:
    """Moment arms per joint, from --r-star values or the stored force report."""
    if config.r_star_mm:
        assignments = []
        for key, value in config.r_star_mm.items():
            if key not in hand.key_of:
                msg = f"--r-star names unknown joint {key!r}"
                raise ConfigError(msg)
            assignments.append((ParamKind.MOMENT_ARM, hand.key_of[key], value * MM))
        params = ActuationParams.from_keys(hand, assignments)
    else:
        force = store.read_report(FORCE_REPORT, OptimizationReport)
        if force is None:
            msg = f"{FORCE_REPORT} not found in {store.base_dir}; run force-opt or pass --r-star"
            raise MissingInputError(msg)
        params = ActuationParams(r=force.moment_arms())
    params.validate_for(hand)
    return dict(params.r)


def cmd_kin_opt(config: RunConfig) -> int:
    hand, poses = _load_inputs(config)
    store = ReportStore(config.output_dir)
    r_star = _r_star(config, hand, store)
    grid = load_grid(_require(config.kin_grid_path, "kinematic grid"))
    report = kinematic_optimize(
        hand,
        poses,
        grid,
        r_star,
        open_pose_weight=config.open_pose_weight,
        decompose=config.decompose,
        threads=config.worker_count,
        chunk_size=config.chunk_size,
        trace=config.trace,
    )
    report = report.model_copy(update={"config": config.provenance()})
    _write_search(store, report, KIN_REPORT, KIN_TRACE)
    print(
        f"kinematic: best {report.best_combo} Q={report.best_q:.6g} "
        f"(baseline {report.baseline_q})"
    )
    return ExitCode.OK


def _preload_bounds(config: RunConfig, hand: HandKinematics) -> dict[str, tuple[float, float]]:
    """Preload bounds of the kinematic grid, when one is given."""
    path = config.kin_grid_path
    if path is None or not path.is_file():
        return {}
    grid = load_grid(path).bind(hand, [ParamKind.STIFFNESS, ParamKind.PRELOAD])
    return grid.preload_bounds(hand)


def cmd_analyze(config: RunConfig) -> int:
    hand, poses = _load_inputs(config)
    store = ReportStore(config.output_dir)
    force = store.read_report(FORCE_REPORT, OptimizationReport)
    kin = store.read_report(KIN_REPORT, OptimizationReport)
    if force is None or kin is None:
        missing = [n for n, r in ((FORCE_REPORT, force), (KIN_REPORT, kin)) if r is None]
        msg = f"analysis needs {', '.join(missing)} in {store.base_dir}"
        raise MissingInputError(msg)
    params = ActuationParams(
        r=kin.best_params.get(ParamKind.MOMENT_ARM.value, force.moment_arms()),
        K=kin.best_params.get(ParamKind.STIFFNESS.value, {}),
        theta0=kin.best_params.get(ParamKind.PRELOAD.value, {}),
    )
    params.validate_for(hand, _preload_bounds(config, hand))
    report: ComparisonReport = build_comparison_report(
        hand,
        params,
        poses,
        force_report=force,
        kin_report=kin,
        whole_hand_pca=config.whole_hand_pca,
    )
    report.config = config.provenance()
    store.write_json(COMPARISON_REPORT, report)
    store.write_csv(
        MRM_VS_PCA,
        mrm_vs_pca_rows(report),
        ["finger", "joint", "mrm_direction", "mrm_offset", "pca_mean", "pca_component"],
    )
    store.write_csv(DISTANCES, distance_rows(report), ["pose", "finger", "distance_rad"])
    for phase in (report.force, report.kinematic):
        if phase is not None:
            print(
                f"reduction {phase.reduction_pct:.1f}% "
                f"({phase.baseline_q} -> {phase.optimized_q})"
            )
    return ExitCode.OK


def cmd_all(config: RunConfig) -> int:
    stage_seconds: dict[str, float] = {}
    staged = config.model_copy(update={"skip_validate": True})
    stages = (
        ("validate", cmd_validate, config),
        ("force-opt", cmd_force_opt, staged),
        ("kin-opt", cmd_kin_opt, staged),
        ("analyze", cmd_analyze, staged),
    )
    for label, command, stage_config in stages:
        with timed(label) as clock:
            status = command(stage_config)
        stage_seconds[label] = clock["elapsed"]
        if status != ExitCode.OK:
            return status
    logger.info(
        "pipeline_complete",
        stage_seconds=stage_seconds,
        total_seconds=sum(stage_seconds.values()),
    )
    return ExitCode.OK


COMMANDS: dict[str, Callable[[RunConfig], int]] = {
    "validate": cmd_validate,
    "force-opt": cmd_force_opt,
    "kin-opt": cmd_kin_opt,
    "analyze": cmd_analyze,
    "all": cmd_all,
}

_PARSE_ERRORS = (
    DocumentError,
    LinkageError,
    HandModelError,
    GraspModelError,
    GridError,
    ConfigError,
)


def run_command(name: str, config: RunConfig) -> int:
    """Run one command and map failures to the documented exit codes."""
    try:
        return COMMANDS[name](config)
    except MissingInputError as e:
        logger.error("missing_input", command=name, error=str(e))
        print(f"error: {e}")
        return ExitCode.MISSING
    except InfeasibleSearchError as e:
        logger.error("search_infeasible", command=name, blocking=e.blocking_grasps)
        print(f"error: {e} (blocking grasps: {', '.join(e.blocking_grasps)})")
        return ExitCode.INFEASIBLE
    except _PARSE_ERRORS as e:
        logger.error("input_rejected", command=name, error=str(e))
        print(f"error: {e}")
        return ExitCode.PARSE
    except SynergyError as e:
        logger.exception("command_failed", command=name)
        print(f"error: {e}")
        return ExitCode.FAILURE
