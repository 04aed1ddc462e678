"""Infinite-horizon discrete LQR via fixed-point Riccati iteration."""

from dataclasses import dataclass

import numpy as np

from .errors import ConditioningError, ConvergenceError

MAX_ITER = 100_000
STEP_TOL = 1e-12
COND_LIMIT = 1e12


@dataclass(frozen=True, eq=False)
class LqrGain:
    K: np.ndarray
    P_dare: np.ndarray
    residual: float
    spectral_radius: float


def _solve_inner(R, B, P, rhs):
    S = R + B.T @ P @ B
    if np.linalg.cond(S) > COND_LIMIT:
        raise ConditioningError("R + B'PB is singular to working precision")
    return np.linalg.solve(S, rhs)


def riccati_map(A, B, Q, R, P):
    """One application of P -> A'PA - A'PB (R + B'PB)^-1 B'PA + Q."""
    AtPB = A.T @ P @ B
    P_next = A.T @ P @ A - AtPB @ _solve_inner(R, B, P, AtPB.T) + Q
    return 0.5 * (P_next + P_next.T)


def dare_residual(A, B, Q, R, P):
    return float(np.linalg.norm(riccati_map(A, B, Q, R, P) - P, "fro"))


def solve_dare(A, B, Q, R, tol=STEP_TOL, max_iter=MAX_ITER):
    """Iterate the Riccati map from P = Q until it stops moving.

    The stopping rule compares the Frobenius step against ``tol`` scaled by
    ``max(1, ||P||_F)``. Returns ``(P, residual)``.
    """
    A, B, Q, R = (np.atleast_2d(np.asarray(M, dtype=float)) for M in (A, B, Q, R))
    P = 0.5 * (Q + Q.T)
    step = np.inf
    for _ in range(max_iter):
        P_next = riccati_map(A, B, Q, R, P)
        step = float(np.linalg.norm(P_next - P, "fro"))
        P = P_next
        if not np.isfinite(step):
            break
        if step < tol * max(1.0, float(np.linalg.norm(P, "fro"))):
            return P, dare_residual(A, B, Q, R, P)
    raise ConvergenceError("Riccati iteration did not converge", step)


def lqr_gain(model):
    A, B, Q, R = model.A, model.B, model.Q, model.R
    P, residual = solve_dare(A, B, Q, R)
    K = _solve_inner(R, B, P, B.T @ P @ A)
    rho = float(np.max(np.abs(np.linalg.eigvals(A - B @ K))))
    return LqrGain(K=K, P_dare=P, residual=residual, spectral_radius=rho)


def zero_gain(model):
    """Open-loop 'controller' u = 0, used where the LQR problem is not posed."""
    rho = float(np.max(np.abs(np.linalg.eigvals(model.A))))
    return LqrGain(K=np.zeros((model.m, model.n)), P_dare=np.zeros((model.n, model.n)),
                   residual=0.0, spectral_radius=rho)
