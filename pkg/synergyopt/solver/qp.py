"""Dense convex QP with a possibly singular Hessian.

minimize ½xᵀPx + qᵀx + c  subject to  A_eq x = b_eq,  A_in x <= b_in,  x >= lb.

A feasible start comes from a HiGHS phase-1 LP (or the caller). From there a primal
active-set method works on the null space of the working set; directions of zero
curvature are followed as rays until a constraint blocks them, so PSD Hessians need
no regularization.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import structlog
from scipy.linalg import null_space, qr
from scipy.optimize import linprog

from synergyopt.constants import DEFAULT_QP_MAX_ITER, DEFAULT_QP_TOL, PSD_EIG_TOL
from synergyopt.exceptions import SolverError
from synergyopt.types import FloatArray, QpStatus

logger = structlog.get_logger(__name__)

_CURVATURE_TOL = 1e-10
_GRADIENT_TOL = 1e-10
_MULTIPLIER_TOL = 1e-9
_SYMMETRY_TOL = 1e-9


def _matrix(a: FloatArray | None, n: int) -> FloatArray:
    if a is None:
        return np.zeros((0, n))
    return np.atleast_2d(np.asarray(a, dtype=float)).reshape(-1, n)


def _vector(v: FloatArray | None, m: int, fill: float = 0.0) -> FloatArray:
    if v is None:
        return np.full(m, fill)
    return np.asarray(v, dtype=float).reshape(-1)


@dataclass(frozen=True, eq=False)
class QuadraticProgram:
    P: FloatArray
    q: FloatArray
    A_eq: FloatArray
    b_eq: FloatArray
    A_in: FloatArray
    b_in: FloatArray
    lb: FloatArray
    c: float = 0.0

    def __post_init__(self) -> None:
        n = self.P.shape[0] if self.P.ndim == 2 else -1
        if self.P.ndim != 2 or self.P.shape != (n, n):
            msg = f"P must be square, got shape {self.P.shape}"
            raise SolverError(msg)
        checks = (
            ("q", self.q.shape == (n,)),
            ("A_eq", self.A_eq.ndim == 2 and self.A_eq.shape[1] == n),
            ("b_eq", self.b_eq.shape == (self.A_eq.shape[0],)),
            ("A_in", self.A_in.ndim == 2 and self.A_in.shape[1] == n),
            ("b_in", self.b_in.shape == (self.A_in.shape[0],)),
            ("lb", self.lb.shape == (n,)),
        )
        for name, ok in checks:
            if not ok:
                msg = f"QP dimension mismatch in {name} (n={n})"
                raise SolverError(msg)
        if np.any(np.isnan(self.lb)) or np.any(self.lb == np.inf):
            msg = "lower bounds must be finite or -inf"
            raise SolverError(msg)
        if not np.allclose(self.P, self.P.T, rtol=0.0, atol=_SYMMETRY_TOL):
            msg = "P must be symmetric"
            raise SolverError(msg)

    @classmethod
    def build(
        cls,
        P: FloatArray,
        q: FloatArray | None = None,
        *,
        A_eq: FloatArray | None = None,
        b_eq: FloatArray | None = None,
        A_in: FloatArray | None = None,
        b_in: FloatArray | None = None,
        lb: FloatArray | None = None,
        c: float = 0.0,
    ) -> QuadraticProgram:
        """Fill absent blocks with empty matrices; ``lb`` defaults to -inf."""
        P = np.atleast_2d(np.asarray(P, dtype=float))
        n = P.shape[1]
        A_eq_m = _matrix(A_eq, n)
        A_in_m = _matrix(A_in, n)
        return cls(
            P=P,
            q=_vector(q, n),
            A_eq=A_eq_m,
            b_eq=_vector(b_eq, A_eq_m.shape[0]),
            A_in=A_in_m,
            b_in=_vector(b_in, A_in_m.shape[0]),
            lb=_vector(lb, n, fill=-np.inf),
            c=float(c),
        )

    @property
    def n(self) -> int:
        return int(self.P.shape[0])

    def objective(self, x: FloatArray) -> float:
        return float(0.5 * x @ self.P @ x + self.q @ x + self.c)

    def inequality_system(self) -> tuple[FloatArray, FloatArray]:
        """A_in rows followed by one row per finite lower bound, as C x <= d."""
        bounded = np.flatnonzero(np.isfinite(self.lb))
        C = np.vstack([self.A_in, -np.eye(self.n)[bounded]])
        d = np.concatenate([self.b_in, -self.lb[bounded]])
        return C, d


@dataclass(frozen=True)
class KktResiduals:
    stationarity: float = 0.0
    primal_eq: float = 0.0
    primal_in: float = 0.0
    complementarity: float = 0.0

    def worst(self) -> float:
        return max(self.stationarity, self.primal_eq, self.primal_in, self.complementarity)


@dataclass(frozen=True, eq=False)
class QpSolution:
    x: FloatArray
    objective: float
    status: QpStatus
    kkt: KktResiduals = field(default_factory=KktResiduals)
    iterations: int = 0
    eq_multipliers: FloatArray = field(default_factory=lambda: np.zeros(0))
    in_multipliers: FloatArray = field(default_factory=lambda: np.zeros(0))
    bound_multipliers: FloatArray = field(default_factory=lambda: np.zeros(0))
    violation: float = 0.0  # minimum total constraint violation when infeasible
    regularization: float = 0.0

    @property
    def is_optimal(self) -> bool:
        return self.status == QpStatus.OPTIMAL


def _check_psd(P: FloatArray) -> float:
    """Return the largest eigenvalue; raise if P is indefinite beyond tolerance."""
    if P.size == 0:
        return 0.0
    evals = np.linalg.eigvalsh(P)
    scale = float(np.max(np.abs(evals)))
    if evals[0] < -PSD_EIG_TOL * max(scale, 1e-300):
        msg = f"P is not positive semidefinite (min eigenvalue {evals[0]:.3e})"
        raise SolverError(msg)
    return max(float(evals[-1]), 0.0)


def independent_rows(A: FloatArray) -> FloatArray:
    """Ascending indices of a maximal linearly independent subset of A's rows."""
    if A.shape[0] == 0:
        return np.zeros(0, dtype=int)
    _, R, piv = qr(A.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    if diag.size == 0 or diag[0] == 0.0:
        return np.zeros(0, dtype=int)
    rank = int(np.sum(diag > 1e-10 * diag[0]))
    return np.sort(piv[:rank])


def _linprog_bounds(lb: FloatArray) -> list[tuple[float | None, None]]:
    return [(float(v) if np.isfinite(v) else None, None) for v in lb]


def phase_one(qp: QuadraticProgram) -> tuple[FloatArray, float]:
    """Feasible point (violation 0) or the minimum-violation point and its violation."""
    n = qp.n
    res = linprog(
        np.zeros(n),
        A_ub=qp.A_in if qp.A_in.shape[0] else None,
        b_ub=qp.b_in if qp.A_in.shape[0] else None,
        A_eq=qp.A_eq if qp.A_eq.shape[0] else None,
        b_eq=qp.b_eq if qp.A_eq.shape[0] else None,
        bounds=_linprog_bounds(qp.lb),
        method="highs",
    )
    if res.status == 0:
        return np.asarray(res.x, dtype=float), 0.0

    # Elastic LP: minimize total violation of the general constraints.
    m_eq, m_in = qp.A_eq.shape[0], qp.A_in.shape[0]
    n_s = 2 * m_eq + m_in
    c = np.concatenate([np.zeros(n), np.ones(n_s)])
    A_eq = np.hstack([qp.A_eq, np.eye(m_eq), -np.eye(m_eq), np.zeros((m_eq, m_in))])
    A_in = np.hstack([qp.A_in, np.zeros((m_in, 2 * m_eq)), -np.eye(m_in)])
    bounds = _linprog_bounds(qp.lb) + [(0.0, None)] * n_s
    elastic = linprog(
        c,
        A_ub=A_in if m_in else None,
        b_ub=qp.b_in if m_in else None,
        A_eq=A_eq if m_eq else None,
        b_eq=qp.b_eq if m_eq else None,
        bounds=bounds,
        method="highs",
    )
    if elastic.status != 0:
        msg = f"phase-1 LP failed: {elastic.message}"
        raise SolverError(msg)
    return np.asarray(elastic.x[:n], dtype=float), float(elastic.fun)


def _max_violation(qp: QuadraticProgram, x: FloatArray) -> float:
    C, d = qp.inequality_system()
    eq = np.abs(qp.A_eq @ x - qp.b_eq)
    ineq = np.maximum(C @ x - d, 0.0)
    return float(max(eq.max(initial=0.0), ineq.max(initial=0.0)))


def _subspace_step(
    P: FloatArray, g: FloatArray, A_W: FloatArray, curvature_floor: float, grad_tol: float
) -> tuple[FloatArray | None, bool]:
    """Step to the minimizer on {A_W p = 0}; (None, _) when already stationary there.

    Returns (p, is_ray); a ray is a zero-curvature descent direction.
    """
    Z = null_space(A_W) if A_W.shape[0] else np.eye(P.shape[0])
    if Z.shape[1] == 0:
        return None, False
    gz = Z.T @ g
    if float(np.linalg.norm(gz)) <= grad_tol:
        return None, False
    evals, V = np.linalg.eigh(Z.T @ P @ Z)
    curved = evals > curvature_floor
    flat_V = V[:, ~curved]
    gz_flat = flat_V @ (flat_V.T @ gz)
    if float(np.linalg.norm(gz_flat)) > grad_tol:
        return -Z @ gz_flat, True
    curved_V = V[:, curved]
    u = -curved_V @ ((curved_V.T @ gz) / evals[curved])
    return Z @ u, False


def _initial_working_set(
    E: FloatArray, C: FloatArray, d: FloatArray, x: FloatArray, feas_tol: float
) -> list[int]:
    working: list[int] = []
    rows = E
    rank = np.linalg.matrix_rank(rows) if rows.shape[0] else 0
    for i in np.flatnonzero(np.abs(C @ x - d) <= feas_tol):
        candidate = np.vstack([rows, C[i]])
        new_rank = np.linalg.matrix_rank(candidate)
        if new_rank > rank:
            rows, rank = candidate, new_rank
            working.append(int(i))
        if rank == x.shape[0]:
            break
    return working


def solve_qp(
    qp: QuadraticProgram,
    *,
    tol: float = DEFAULT_QP_TOL,
    max_iter: int = DEFAULT_QP_MAX_ITER,
    x0: FloatArray | None = None,
) -> QpSolution:
    """Solve a convex QP; infeasibility is reported through the status, never raised."""
    p_norm = _check_psd(qp.P)
    n = qp.n
    C, d = qp.inequality_system()
    keep = independent_rows(qp.A_eq)
    E = qp.A_eq[keep]
    scale = 1.0 + float(
        np.linalg.norm(qp.q) + np.linalg.norm(qp.b_eq) + np.linalg.norm(qp.b_in)
    )
    feas_tol = tol * scale

    if x0 is not None and _max_violation(qp, np.asarray(x0, dtype=float)) <= feas_tol:
        x = np.asarray(x0, dtype=float).copy()
    else:
        x, violation = phase_one(qp)
        if violation > feas_tol:
            logger.debug("qp_infeasible", violation=violation)
            return QpSolution(
                x=x,
                objective=qp.objective(x),
                status=QpStatus.INFEASIBLE,
                kkt=_residuals(qp, x, E, C, d, np.zeros(E.shape[0]), np.zeros(C.shape[0])),
                violation=violation,
            )
    finite = np.isfinite(qp.lb)
    x[finite] = np.maximum(x[finite], qp.lb[finite])

    working = _initial_working_set(E, C, d, x, feas_tol)
    curvature_floor = _CURVATURE_TOL * p_norm
    status = QpStatus.MAX_ITER
    at_minimum = False
    lam = np.zeros(E.shape[0])
    mu = np.zeros(C.shape[0])
    iterations = 0

    for iterations in range(1, max_iter + 1):
        g = qp.P @ x + qp.q
        A_W = np.vstack([E, C[working]]) if working else E
        grad_tol = _GRADIENT_TOL * (1.0 + float(np.linalg.norm(g)))
        p: FloatArray | None = None
        ray = False
        if not at_minimum:
            p, ray = _subspace_step(qp.P, g, A_W, curvature_floor, grad_tol)
            at_minimum = p is None

        if at_minimum:
            if A_W.shape[0]:
                mult = np.linalg.lstsq(A_W.T, -g, rcond=None)[0]
            else:
                mult = np.zeros(0)
            lam = mult[: E.shape[0]]
            mu_w = mult[E.shape[0] :]
            mult_tol = _MULTIPLIER_TOL * (1.0 + float(np.linalg.norm(g)))
            negative = np.flatnonzero(mu_w < -mult_tol)
            if negative.size == 0:
                mu = np.zeros(C.shape[0])
                mu[working] = np.maximum(mu_w, 0.0)
                status = QpStatus.OPTIMAL
                break
            # smallest constraint index among the negative multipliers
            drop = min((working[k] for k in negative))
            working.remove(drop)
            at_minimum = False
            continue

        assert p is not None
        Cp = C @ p
        slack = np.maximum(d - C @ x, 0.0)
        row_norms = np.linalg.norm(C, axis=1)
        moving = (Cp > 1e-12 * float(np.linalg.norm(p)) * row_norms) & ~np.isin(
            np.arange(C.shape[0]), working
        )
        alpha_limit = np.inf if ray else 1.0
        blocking = -1
        if np.any(moving):
            ratios = np.full(C.shape[0], np.inf)
            ratios[moving] = slack[moving] / Cp[moving]
            blocking = int(np.argmin(ratios))
            alpha = float(ratios[blocking])
        else:
            alpha = np.inf
        if alpha < alpha_limit:
            x = x + alpha * p
            working.append(blocking)
            at_minimum = False
        elif ray:
            logger.debug("qp_unbounded", iterations=iterations)
            return QpSolution(
                x=x, objective=-np.inf, status=QpStatus.UNBOUNDED, iterations=iterations
            )
        else:
            x = x + p
            at_minimum = True

    kkt = _residuals(qp, x, E, C, d, lam, mu)
    if status == QpStatus.OPTIMAL and kkt.worst() > tol * scale:
        status = QpStatus.INACCURATE
    if status != QpStatus.OPTIMAL:
        logger.debug("qp_not_optimal", status=status.value, iterations=iterations, kkt=kkt.worst())

    lam_full = np.zeros(qp.A_eq.shape[0])
    lam_full[keep] = lam
    m_in = qp.A_in.shape[0]
    bound_mult = np.zeros(n)
    bound_mult[np.flatnonzero(np.isfinite(qp.lb))] = mu[m_in:]
    return QpSolution(
        x=x,
        objective=qp.objective(x),
        status=status,
        kkt=kkt,
        iterations=iterations,
        eq_multipliers=lam_full,
        in_multipliers=mu[:m_in],
        bound_multipliers=bound_mult,
    )


def _residuals(
    qp: QuadraticProgram,
    x: FloatArray,
    E: FloatArray,
    C: FloatArray,
    d: FloatArray,
    lam: FloatArray,
    mu: FloatArray,
) -> KktResiduals:
    grad = qp.P @ x + qp.q + E.T @ lam + C.T @ mu
    slack = d - C @ x
    return KktResiduals(
        stationarity=float(np.linalg.norm(grad)),
        primal_eq=float(np.linalg.norm(qp.A_eq @ x - qp.b_eq)),
        primal_in=float(np.linalg.norm(np.maximum(-slack, 0.0))),
        complementarity=float(np.sum(np.abs(mu * slack))),
    )
