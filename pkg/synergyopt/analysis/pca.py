"""Principal components of grasp postures."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from synergyopt.exceptions import AnalysisError
from synergyopt.types import FloatArray

if TYPE_CHECKING:
    from collections.abc import Sequence

    from synergyopt.grasp.matrices import GraspSample

_ZERO_VARIANCE = 1e-15
_SIGN_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class PCAResult:
    mean: FloatArray
    components: FloatArray  # rows, orthonormal, by decreasing variance
    explained_variance: FloatArray
    degenerate: bool = False

    def project(self, theta: FloatArray) -> FloatArray:
        return self.components @ (np.asarray(theta, dtype=float) - self.mean)

    def reconstruct(self, scores: FloatArray) -> FloatArray:
        return self.mean + self.components.T @ scores


def _fix_signs(components: FloatArray) -> FloatArray:
    """Make the first non-negligible entry of every row positive."""
    out = components.copy()
    for row in out:
        nonzero = np.flatnonzero(np.abs(row) > _SIGN_TOL)
        if nonzero.size and row[nonzero[0]] < 0.0:
            row *= -1.0
    return out


def pca_grasps(
    poses: Sequence[GraspSample], joint_subset: Sequence[int] | None = None
) -> PCAResult:
    """Principal axes of the pose angles restricted to ``joint_subset`` (all joints if None)."""
    if len(poses) < 2:
        msg = f"PCA needs at least two poses, got {len(poses)}"
        raise AnalysisError(msg)
    X = np.array([np.asarray(p.theta, dtype=float) for p in poses])
    if joint_subset is not None:
        X = X[:, list(joint_subset)]
    mean = X.mean(axis=0)
    centered = X - mean
    cov = centered.T @ centered / (len(poses) - 1)
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(-evals, kind="stable")
    variances = np.clip(evals[order], 0.0, None)
    if float(variances.max(initial=0.0)) <= _ZERO_VARIANCE:
        n = X.shape[1]
        return PCAResult(
            mean=mean, components=np.eye(n), explained_variance=np.zeros(n), degenerate=True
        )
    return PCAResult(
        mean=mean,
        components=_fix_signs(evecs[:, order].T),
        explained_variance=variances,
    )
