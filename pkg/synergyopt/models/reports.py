"""Report contracts written to the output directory.

Infinite stability metrics (infeasible samples) are stored as ``None``.
"""

from __future__ import annotations

import math
from typing import Any

from pydantic import BaseModel

from synergyopt.constants import SCHEMA_VERSION
from synergyopt.types import Phase


def finite_or_none(value: float) -> float | None:
    return value if math.isfinite(value) else None


class SearchTiming(BaseModel):
    wall_seconds: float
    combos_per_second: float
    threads: int


class TraceRow(BaseModel):
    component: str
    index: int
    combo: dict[str, float]
    q: float | None


class ComponentResult(BaseModel):
    """One independently searched block of parameters (a finger or linked fingers)."""

    name: str
    fingers: list[str]
    parameters: list[str] = []
    combos: int = 1
    best_q: float | None = None
    skipped_infeasible: int = 0


class OptimizationReport(BaseModel):
    schema_version: str = SCHEMA_VERSION
    phase: Phase
    parameters: list[str] = []
    best_combo: dict[str, float] = {}
    best_params: dict[str, dict[str, float]] = {}  # kind -> joint id -> SI value
    best_q: float
    per_grasp_q: dict[str, float | None] = {}
    weights: dict[str, float] = {}
    baseline_combo: dict[str, float] = {}
    baseline_q: float | None = None
    baseline_per_grasp_q: dict[str, float | None] = {}
    combos_evaluated: int = 0
    combos_total: int = 0
    skipped_infeasible: int = 0
    components: list[ComponentResult] = []
    trace: list[TraceRow] | None = None
    config: dict[str, Any] = {}
    timing: SearchTiming | None = None

    @property
    def reduction_pct(self) -> float:
        return reduction_pct(self.baseline_q, self.best_q)

    def moment_arms(self) -> dict[str, float]:
        return dict(self.best_params.get("r", {}))

    def deterministic_payload(self) -> dict[str, Any]:
        """Everything except wall-clock fields."""
        return self.model_dump(mode="json", exclude={"timing"})


class ClosureEntry(BaseModel):
    grasp: str
    margin: float
    force_margin: float
    torque_margin: float
    is_closure: bool
    directions: int


class ValidationReport(BaseModel):
    schema_version: str = SCHEMA_VERSION
    hand_joints: int
    hand_tendons: int
    grasps: int
    poses_without_contacts: list[str] = []
    out_of_limits: dict[str, list[str]] = {}
    closure: list[ClosureEntry] = []
    failed: list[str] = []
    config: dict[str, Any] = {}

    @property
    def ok(self) -> bool:
        return not self.failed


class ManifoldEntry(BaseModel):
    finger: str
    joint_ids: list[str]
    direction: list[float]
    offset: list[float]
    t_range: tuple[float, float] | None
    pca_mean: list[float] | None = None
    pca_component: list[float] | None = None
    pca_explained_variance: list[float] = []
    alignment: float | None = None  # |cos| between the manifold and the first component


class PhaseComparison(BaseModel):
    baseline_q: float | None
    optimized_q: float
    reduction_pct: float


class DistanceRow(BaseModel):
    pose: str
    finger: str
    distance_rad: float


class ComparisonReport(BaseModel):
    schema_version: str = SCHEMA_VERSION
    manifolds: list[ManifoldEntry] = []
    unsupported_fingers: list[str] = []
    unreachable_fingers: list[str] = []
    whole_hand_pca: list[list[float]] | None = None
    distances: list[DistanceRow] = []
    force: PhaseComparison | None = None
    kinematic: PhaseComparison | None = None
    config: dict[str, Any] = {}


def reduction_pct(baseline: float | None, optimized: float) -> float:
    """Percent reduction from baseline; 0 when the baseline is missing or zero."""
    if baseline is None or baseline <= 0.0 or not math.isfinite(baseline):
        return 0.0
    return 100.0 * (baseline - optimized) / baseline
