"""Parameter grids: free axes enumerated in order, pinned values held fixed."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
import structlog

from synergyopt.exceptions import DocumentError, GridError
from synergyopt.hand.model import ActuationParams
from synergyopt.models.documents import (
    GridDoc,
    load_document,
    parse_document,
    split_fixed_name,
    split_param_name,
)
from synergyopt.types import ParamKind

if TYPE_CHECKING:
    from collections.abc import Iterable, Iterator, Sequence
    from pathlib import Path
    from typing import Any

    from synergyopt.hand.model import HandKinematics

logger = structlog.get_logger(__name__)

Combo = tuple[float, ...]


def param_name(kind: ParamKind, key: str) -> str:
    return f"{kind.value}_{key}"


@dataclass(frozen=True)
class ParameterAxis:
    """One free parameter: SI values in enumeration order."""

    kind: ParamKind
    key: str
    values: tuple[float, ...]
    explicit: bool = False  # a vendor-style value list rather than a range

    def __post_init__(self) -> None:
        if not self.values:
            msg = f"axis {self.name} has no values"
            raise GridError(msg)
        if self.kind != ParamKind.PRELOAD and any(v <= 0.0 for v in self.values):
            msg = f"axis {self.name} must hold positive values"
            raise GridError(msg)

    @property
    def name(self) -> str:
        return param_name(self.kind, self.key)

    @property
    def size(self) -> int:
        return len(self.values)

    def midpoint(self) -> float:
        """Range midpoint, or the median element of an explicit list."""
        if self.explicit:
            return float(np.median(self.values))
        return 0.5 * (min(self.values) + max(self.values))


@dataclass(frozen=True)
class ParameterGrid:
    axes: tuple[ParameterAxis, ...] = ()
    fixed: tuple[tuple[ParamKind, str, float], ...] = ()

    def __post_init__(self) -> None:
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            msg = "grid declares an axis twice"
            raise GridError(msg)
        pinned = [param_name(k, key) for k, key, _ in self.fixed]
        if len(set(pinned)) != len(pinned):
            msg = "grid pins a parameter twice"
            raise GridError(msg)
        overlap = set(names) & set(pinned)
        if overlap:
            msg = f"parameters both free and fixed: {sorted(overlap)}"
            raise GridError(msg)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.axes)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(a.size for a in self.axes)

    @property
    def size(self) -> int:
        return math.prod(self.shape)

    @property
    def kinds(self) -> frozenset[ParamKind]:
        return frozenset({a.kind for a in self.axes} | {k for k, _, _ in self.fixed})

    def combos(self) -> Iterator[Combo]:
        """Every combination in lexicographic index order (last axis fastest)."""
        return itertools.product(*(a.values for a in self.axes))

    def combo_at(self, index: int) -> Combo:
        if not 0 <= index < self.size:
            msg = f"combo index {index} outside grid of size {self.size}"
            raise GridError(msg)
        idx = np.unravel_index(index, self.shape) if self.axes else ()
        return tuple(a.values[int(i)] for a, i in zip(self.axes, idx, strict=True))

    def baseline(self) -> Combo:
        """Mid-range parameters; may lie off the grid."""
        return tuple(a.midpoint() for a in self.axes)

    def label(self, combo: Sequence[float]) -> dict[str, float]:
        return dict(zip(self.names, (float(v) for v in combo), strict=True))

    def to_params(self, hand: HandKinematics, combo: Sequence[float]) -> ActuationParams:
        """Fixed values plus one combo, expanded over mirror groups."""
        if len(combo) != len(self.axes):
            msg = f"combo has {len(combo)} values, grid has {len(self.axes)} axes"
            raise GridError(msg)
        assignments = list(self.fixed) + [
            (a.kind, a.key, float(v)) for a, v in zip(self.axes, combo, strict=True)
        ]
        return ActuationParams.from_keys(hand, assignments)

    def preload_bounds(self, hand: HandKinematics) -> dict[str, tuple[float, float]]:
        """Per-joint [min, max] of the preloads this grid can assign."""
        spans = [
            (a.key, min(a.values), max(a.values))
            for a in self.axes
            if a.kind == ParamKind.PRELOAD
        ]
        spans += [(key, v, v) for kind, key, v in self.fixed if kind == ParamKind.PRELOAD]
        bounds: dict[str, tuple[float, float]] = {}
        for key, lo, hi in spans:
            for joint_id in hand.parameter_keys[hand.key_of[key]]:
                bounds[joint_id] = (lo, hi)
        return bounds

    def subgrid(self, names: Iterable[str]) -> ParameterGrid:
        """Grid restricted to the named free axes; fixed values are kept."""
        wanted = set(names)
        return ParameterGrid(
            axes=tuple(a for a in self.axes if a.name in wanted), fixed=self.fixed
        )

    def bind(self, hand: HandKinematics, kinds: Iterable[ParamKind]) -> ParameterGrid:
        """Check parameter keys against ``hand`` and the allowed kinds.

        Keys naming a non-leading member of a mirror group are rewritten to the group key.
        """
        allowed = frozenset(kinds)

        def canonical(kind: ParamKind, key: str) -> str:
            if kind not in allowed:
                kinds_text = ", ".join(sorted(k.value for k in allowed))
                msg = f"parameter {param_name(kind, key)} not searched here (allowed: {kinds_text})"
                raise GridError(msg)
            if key not in hand.key_of:
                msg = f"parameter {param_name(kind, key)} names unknown joint {key!r}"
                raise GridError(msg)
            return hand.key_of[key]

        axes = tuple(
            ParameterAxis(a.kind, canonical(a.kind, a.key), a.values, a.explicit)
            for a in self.axes
        )
        fixed = tuple((k, canonical(k, key), v) for k, key, v in self.fixed)
        return ParameterGrid(axes=axes, fixed=fixed)


def grid_from_document(doc: GridDoc) -> ParameterGrid:
    fixed: list[tuple[ParamKind, str, float]] = []
    for name, value in doc.fixed.items():
        kind, key, scale = split_fixed_name(name)
        fixed.append((kind, key, float(value) * scale))
    pinned = {param_name(k, key) for k, key, _ in fixed}

    axes: list[ParameterAxis] = []
    for name, axis_doc in doc.parameters.items():
        kind, key = split_param_name(name)
        if name in pinned:
            logger.info("grid_axis_pinned", parameter=name)
            continue
        values = axis_doc.to_si_values(kind, name)
        explicit = any(k.startswith("values") for k in (axis_doc.model_extra or {}))
        try:
            axes.append(ParameterAxis(kind, key, values, explicit))
        except GridError as e:
            raise DocumentError(str(e), field=f"parameters.{name}") from e
    return ParameterGrid(axes=tuple(axes), fixed=tuple(fixed))


def load_grid(source: Path | dict[str, Any]) -> ParameterGrid:
    """Load a parameter grid from a file path or an already-parsed mapping."""
    if isinstance(source, dict):
        doc = parse_document(GridDoc, source, source="grid")
    else:
        doc = load_document(GridDoc, source)
    grid = grid_from_document(doc)
    logger.debug("grid_loaded", axes=list(grid.names), combos=grid.size)
    return grid
