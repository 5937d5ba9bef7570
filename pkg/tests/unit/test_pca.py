import math

import numpy as np
import pytest

from synergyopt.analysis import pca_grasps
from synergyopt.exceptions import AnalysisError
from synergyopt.grasp.matrices import GraspSample


def _poses(rows: np.ndarray | list[list[float]]) -> list[GraspSample]:
    return [GraspSample(f"g{i}", np.asarray(row, dtype=float)) for i, row in enumerate(rows)]


def _jacobi_eigen(S: np.ndarray, sweeps: int = 50) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi rotations; columns of V are eigenvectors."""
    A = S.copy()
    n = A.shape[0]
    V = np.eye(n)
    for _ in range(sweeps):
        off = math.sqrt(float(np.sum(A**2) - np.sum(np.diag(A) ** 2)))
        if off < 1e-14:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(A[p, q]) < 1e-300:
                    continue
                theta = 0.5 * math.atan2(2.0 * A[p, q], A[q, q] - A[p, p])
                c, s = math.cos(theta), math.sin(theta)
                J = np.eye(n)
                J[p, p] = J[q, q] = c
                J[p, q], J[q, p] = s, -s
                A = J.T @ A @ J
                V = V @ J
    return np.diag(A), V


@pytest.mark.unit
class TestPcaGrasps:
    def test_collinear_poses(self) -> None:
        result = pca_grasps(_poses([[t, 2.0 * t] for t in range(4)]))
        np.testing.assert_allclose(result.components[0], np.array([1.0, 2.0]) / math.sqrt(5.0))
        np.testing.assert_allclose(result.explained_variance, [5.0 * 5.0 / 3.0, 0.0], atol=1e-12)
        np.testing.assert_allclose(result.mean, [1.5, 3.0])
        assert not result.degenerate

    def test_two_points(self) -> None:
        result = pca_grasps(_poses([[0.0, 0.0], [2.0, 0.0]]))
        np.testing.assert_allclose(result.components[0], [1.0, 0.0], atol=1e-12)
        assert result.explained_variance[0] == pytest.approx(2.0)

    def test_matches_jacobi_eigenvectors(self, rng: np.random.Generator) -> None:
        X = rng.normal(size=(12, 4)) @ np.diag([3.0, 2.0, 1.0, 0.5])
        result = pca_grasps(_poses(X))
        evals, evecs = _jacobi_eigen(np.cov(X, rowvar=False))
        order = np.argsort(-evals)
        np.testing.assert_allclose(result.explained_variance, evals[order], rtol=1e-9)
        for k, column in enumerate(order):
            assert abs(result.components[k] @ evecs[:, column]) == pytest.approx(1.0)

    def test_orthonormal_and_reconstructs(self, rng: np.random.Generator) -> None:
        X = rng.normal(size=(6, 3))
        result = pca_grasps(_poses(X))
        np.testing.assert_allclose(result.components @ result.components.T, np.eye(3), atol=1e-12)
        for row in X:
            np.testing.assert_allclose(result.reconstruct(result.project(row)), row, atol=1e-12)

    def test_variances_sorted(self, rng: np.random.Generator) -> None:
        result = pca_grasps(_poses(rng.normal(size=(8, 5))))
        assert np.all(np.diff(result.explained_variance) <= 0.0)

    def test_sign_convention(self, rng: np.random.Generator) -> None:
        result = pca_grasps(_poses(-rng.normal(size=(8, 3))))
        for row in result.components:
            first = row[np.flatnonzero(np.abs(row) > 1e-12)[0]]
            assert first > 0.0

    def test_identical_poses_are_degenerate(self) -> None:
        result = pca_grasps(_poses([[0.3, 0.1, 0.2]] * 3))
        assert result.degenerate
        np.testing.assert_array_equal(result.components, np.eye(3))
        np.testing.assert_array_equal(result.explained_variance, np.zeros(3))

    def test_joint_subset(self, rng: np.random.Generator) -> None:
        X = rng.normal(size=(7, 4))
        subset = pca_grasps(_poses(X), joint_subset=[1, 3])
        direct = pca_grasps(_poses(X[:, [1, 3]]))
        np.testing.assert_allclose(subset.components, direct.components)
        np.testing.assert_allclose(subset.mean, X[:, [1, 3]].mean(axis=0))

    @pytest.mark.parametrize("count", [0, 1])
    def test_too_few_poses(self, count: int) -> None:
        with pytest.raises(AnalysisError, match="at least two poses"):
            pca_grasps(_poses([[0.0, 0.0]] * count))
