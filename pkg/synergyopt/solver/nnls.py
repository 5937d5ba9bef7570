"""Nonnegative least squares (Lawson-Hanson via SciPy)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import nnls

from synergyopt.exceptions import SolverError
from synergyopt.types import FloatArray


@dataclass(frozen=True, eq=False)
class NnlsResult:
    t: FloatArray
    residual: float


def solve_nnls(R: FloatArray, tau_s: FloatArray) -> NnlsResult:
    """Minimize ‖R t − τ_s‖ over t >= 0."""
    R = np.atleast_2d(np.asarray(R, dtype=float))
    tau_s = np.asarray(tau_s, dtype=float)
    if tau_s.ndim != 1 or R.shape[0] != tau_s.shape[0]:
        msg = f"NNLS dimension mismatch: R is {R.shape}, tau_s is {tau_s.shape}"
        raise SolverError(msg)
    if R.shape[1] == 0:
        return NnlsResult(t=np.zeros(0), residual=float(np.linalg.norm(tau_s)))
    t, _ = nnls(R, tau_s, maxiter=max(50, 10 * R.shape[1]))
    # residual at the returned t, not the solver's running estimate
    return NnlsResult(t=t, residual=float(np.linalg.norm(R @ t - tau_s)))
