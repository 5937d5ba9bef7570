"""Exception hierarchy for synergyopt."""

from __future__ import annotations


class SynergyError(Exception):
    """Base exception for all synergyopt errors."""


class DocumentError(SynergyError):
    """Raised when an input document fails to parse or validate."""

    def __init__(self, message: str, field: str | None = None, line: int | None = None) -> None:
        super().__init__(message)
        self.field = field
        self.line = line

    def __str__(self) -> str:
        where = []
        if self.line is not None:
            where.append(f"line {self.line}")
        if self.field:
            where.append(f"field '{self.field}'")
        prefix = f"[{', '.join(where)}] " if where else ""
        return f"{prefix}{self.args[0]}"


class LinkageError(SynergyError):
    """Raised when a hand description references unknown joints or links."""


class HandModelError(SynergyError):
    """Raised on invalid kinematic queries (dimension mismatch, bad parameters)."""


class GraspModelError(SynergyError):
    """Raised when grasp matrices cannot be assembled."""


class SolverError(SynergyError):
    """Raised for malformed or unbounded optimization problems."""


class GridError(SynergyError):
    """Raised when a parameter grid is empty or does not match the hand."""


class InfeasibleSearchError(SynergyError):
    """Raised when no parameter combination is feasible for every grasp."""

    def __init__(self, message: str, blocking_grasps: list[str]) -> None:
        super().__init__(message)
        self.blocking_grasps = blocking_grasps


class AnalysisError(SynergyError):
    """Raised when a manifold or comparison cannot be derived."""


class ConfigError(SynergyError):
    """Raised when configuration is invalid."""


class MissingInputError(SynergyError):
    """Raised when a pipeline stage is missing a prerequisite input."""
