"""Input document schemas (hand, grasp set, parameter grid) with Pydantic validation."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from synergyopt.constants import MM, NMM_PER_RAD
from synergyopt.exceptions import DocumentError
from synergyopt.types import AxisKind, ParamKind


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class OffsetDoc(_Strict):
    translation_mm: tuple[float, float, float] = (0.0, 0.0, 0.0)
    rpy_rad: tuple[float, float, float] = (0.0, 0.0, 0.0)


class JointDoc(_Strict):
    id: str = Field(min_length=1)
    axis_kind: AxisKind
    axis: tuple[float, float, float]
    offset: OffsetDoc = Field(default_factory=OffsetDoc)
    limits_rad: tuple[float, float]

    @field_validator("limits_rad")
    @classmethod
    def _ordered_limits(cls, v: tuple[float, float]) -> tuple[float, float]:
        if not v[0] < v[1]:
            raise ValueError("limits_rad must satisfy min < max")
        return v

    @field_validator("axis")
    @classmethod
    def _nonzero_axis(cls, v: tuple[float, float, float]) -> tuple[float, float, float]:
        if float(np.linalg.norm(v)) == 0.0:
            raise ValueError("axis must be non-zero")
        return v


class FingerDoc(_Strict):
    name: str = Field(min_length=1)
    joints: list[JointDoc] = Field(min_length=1)
    # Fingertip offset from the last joint frame; sets the distal link's long axis.
    tip_mm: tuple[float, float, float] | None = None


class CrossingDoc(_Strict):
    joint: str
    sign: int

    @field_validator("sign")
    @classmethod
    def _unit_sign(cls, v: int) -> int:
        if v not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        return v


class TendonDoc(_Strict):
    id: str = Field(min_length=1)
    crossings: list[CrossingDoc] = Field(min_length=1)


class HandDoc(_Strict):
    fingers: list[FingerDoc] = Field(min_length=1)
    tendons: list[TendonDoc] = Field(default_factory=list)
    mirror_groups: list[list[str]] = Field(default_factory=list)
    palm: OffsetDoc = Field(default_factory=OffsetDoc)


class PoseDoc(_Strict):
    position_m: tuple[float, float, float] = (0.0, 0.0, 0.0)
    rpy_rad: tuple[float, float, float] = (0.0, 0.0, 0.0)


class ContactDoc(_Strict):
    link: str
    position_m: tuple[float, float, float]
    normal: tuple[float, float, float]
    mu: float = Field(ge=0.0)
    edges: int | None = Field(default=None, ge=1)
    tangent: tuple[float, float, float] | None = None

    @field_validator("normal")
    @classmethod
    def _nonzero_normal(cls, v: tuple[float, float, float]) -> tuple[float, float, float]:
        if float(np.linalg.norm(v)) == 0.0:
            raise ValueError("normal must be non-zero")
        return v


class GraspDoc(_Strict):
    name: str = Field(min_length=1)
    theta_rad: list[float]
    weight: float = Field(default=1.0, ge=0.0)
    object_pose: PoseDoc = Field(default_factory=PoseDoc)
    contacts: list[ContactDoc] = Field(default_factory=list)
    open: bool = False


class GraspSetDoc(_Strict):
    grasps: list[GraspDoc] = Field(min_length=1)


# Per-kind unit suffixes and their SI scale factors.
_UNITS: dict[ParamKind, dict[str, float]] = {
    ParamKind.MOMENT_ARM: {"mm": MM, "m": 1.0},
    ParamKind.STIFFNESS: {"nmm_per_rad": NMM_PER_RAD, "nm_per_rad": 1.0},
    ParamKind.PRELOAD: {"rad": 1.0},
}


def split_param_name(name: str) -> tuple[ParamKind, str]:
    """Split ``r_td`` / ``K_fp`` / ``theta0_fr`` into (kind, key)."""
    for kind in (ParamKind.PRELOAD, ParamKind.STIFFNESS, ParamKind.MOMENT_ARM):
        prefix = f"{kind.value}_"
        if name.startswith(prefix) and len(name) > len(prefix):
            return kind, name[len(prefix) :]
    msg = f"parameter name must start with r_, K_ or theta0_: {name!r}"
    raise DocumentError(msg, field=name)


def split_fixed_name(name: str) -> tuple[ParamKind, str, float]:
    """Split ``r_tp_mm`` into (kind, key, SI scale)."""
    kind, rest = split_param_name(name)
    for unit, scale in sorted(_UNITS[kind].items(), key=lambda u: -len(u[0])):
        suffix = f"_{unit}"
        if rest.endswith(suffix) and len(rest) > len(suffix):
            return kind, rest[: -len(suffix)], scale
    units = ", ".join(_UNITS[kind])
    msg = f"fixed parameter {name!r} needs a unit suffix ({units})"
    raise DocumentError(msg, field=f"fixed.{name}")


class AxisDoc(BaseModel):
    """One grid axis. Keys carry their unit, e.g. ``min_mm`` or ``values_nmm_per_rad``."""

    model_config = ConfigDict(extra="allow")

    count: int | None = Field(default=None, ge=1)

    def to_si_values(self, kind: ParamKind, name: str) -> tuple[float, ...]:
        """Resolve the axis to an ordered tuple of SI values (endpoints inclusive)."""
        raw: dict[str, Any] = dict(self.model_extra or {})
        units = _UNITS[kind]
        found: dict[str, Any] = {}
        scale: float | None = None
        for key, value in raw.items():
            field, _, unit = key.partition("_")
            if field not in ("min", "max", "step", "values") or unit not in units:
                msg = f"unknown key {key!r} for a {kind.value} axis"
                raise DocumentError(msg, field=f"parameters.{name}.{key}")
            if scale is not None and units[unit] != scale:
                msg = "mixed units within one axis"
                raise DocumentError(msg, field=f"parameters.{name}")
            scale = units[unit]
            found[field] = value
        if scale is None:
            msg = "axis declares no values"
            raise DocumentError(msg, field=f"parameters.{name}")

        if "values" in found:
            values = [float(v) * scale for v in found["values"]]
            if not values:
                msg = "explicit value list is empty"
                raise DocumentError(msg, field=f"parameters.{name}.values")
            return tuple(values)

        if "min" not in found or "max" not in found:
            msg = "range axis needs both min and max"
            raise DocumentError(msg, field=f"parameters.{name}")
        lo, hi = float(found["min"]) * scale, float(found["max"]) * scale
        if lo > hi:
            msg = "min must not exceed max"
            raise DocumentError(msg, field=f"parameters.{name}")
        if self.count is not None:
            return tuple(float(v) for v in np.linspace(lo, hi, self.count))
        if "step" not in found:
            msg = "range axis needs step or count"
            raise DocumentError(msg, field=f"parameters.{name}")
        step = float(found["step"]) * scale
        if step <= 0.0:
            msg = "step must be positive"
            raise DocumentError(msg, field=f"parameters.{name}.step")
        n = int(np.floor((hi - lo) / step + 1e-9)) + 1
        return tuple(lo + i * step for i in range(n))


class GridDoc(_Strict):
    parameters: dict[str, AxisDoc] = Field(default_factory=dict)
    fixed: dict[str, float] = Field(default_factory=dict)


def _load_raw(path: Path) -> Any:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        msg = f"cannot read {path}: {e}"
        raise DocumentError(msg) from e
    if path.suffix.lower() in (".yaml", ".yml"):
        try:
            return yaml.safe_load(text)
        except yaml.YAMLError as e:
            mark = getattr(e, "problem_mark", None)
            line = mark.line + 1 if mark is not None else None
            msg = f"invalid YAML in {path.name}: {e}"
            raise DocumentError(msg, line=line) from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        msg = f"invalid JSON in {path.name}: {e.msg} (column {e.colno})"
        raise DocumentError(msg, line=e.lineno) from e


def parse_document[M: BaseModel](model: type[M], data: Any, source: str = "document") -> M:
    """Validate raw data against a schema, reporting the first offending field."""
    try:
        return model.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(p) for p in first["loc"])
        msg = f"{source}: {first['msg']} ({e.error_count()} error(s))"
        raise DocumentError(msg, field=field) from e


def load_document[M: BaseModel](model: type[M], path: Path) -> M:
    """Read a JSON or YAML document from disk and validate it."""
    return parse_document(model, _load_raw(path), source=path.name)
