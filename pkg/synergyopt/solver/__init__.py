"""Small dense convex solvers: active-set QP and nonnegative least squares."""

from synergyopt.solver.nnls import NnlsResult, solve_nnls
from synergyopt.solver.qp import KktResiduals, QpSolution, QuadraticProgram, solve_qp

__all__ = [
    "KktResiduals",
    "NnlsResult",
    "QpSolution",
    "QuadraticProgram",
    "solve_nnls",
    "solve_qp",
]
