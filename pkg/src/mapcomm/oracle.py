"""History-based decoder baseline: box-constrained minimum-shift QP.

Solves min ||x - x0||^2 subject to the stacked history of linear
observations A x = o and 0 <= x <= 1.  Used as a correctness oracle for the
iterative decoder and as the runtime-scaling baseline; it re-solves over
the full history each call, so its cost grows with the number of stacked
rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import lsq_linear

from .abstraction import ObservationOperator

__all__ = ["HistoryStack", "QPResult", "solve_history_qp"]


@dataclass
class HistoryStack:
    """All operators and measurement vectors observed up to now."""

    n_cells: int
    prior_mean: np.ndarray
    operators: list = field(default_factory=list)
    observations: list = field(default_factory=list)

    def __post_init__(self):
        self.prior_mean = np.broadcast_to(
            np.asarray(self.prior_mean, dtype=float), (self.n_cells,)
        ).copy()
        if len(self.operators) != len(self.observations):
            raise ValueError("operators and observations must pair up")

    def push(self, op: ObservationOperator, obs: np.ndarray) -> None:
        obs = np.asarray(obs, dtype=float).ravel()
        if obs.size != op.rows or op.n_cols != self.n_cells:
            raise ValueError("operator/observation dimension mismatch")
        self.operators.append(op)
        self.observations.append(obs)

    @property
    def total_rows(self) -> int:
        return sum(op.rows for op in self.operators)

    def stacked(self) -> tuple[np.ndarray, np.ndarray]:
        if not self.operators:
            return np.zeros((0, self.n_cells)), np.zeros(0)
        A = np.vstack([op.to_dense() for op in self.operators])
        o = np.concatenate(self.observations)
        return A, o


@dataclass
class QPResult:
    x: np.ndarray
    feasible: bool  # equality constraints satisfied (noiseless history)
    iterations: int
    used_penalty_fallback: bool


def _equality_step(A, o, x0, fixed_lo, fixed_hi, jitter=1e-12):
    """Minimize ||x - x0||^2 over free variables with A x = o and the fixed
    variables pinned at their bounds.  Returns (x, lam) with the equality
    multipliers; rank-deficient systems get the least-squares multiplier."""
    x = x0.copy()
    x[fixed_lo] = 0.0
    x[fixed_hi] = 1.0
    free = ~(fixed_lo | fixed_hi)
    A_free = A[:, free]
    rhs = o - A @ x  # residual with free vars at x0
    gram = A_free @ A_free.T
    gram[np.diag_indices_from(gram)] += jitter
    try:
        lam = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        lam = np.linalg.lstsq(gram, rhs, rcond=None)[0]
    x[free] = x0[free] + A_free.T @ lam
    return x, lam, free


def solve_history_qp(
    stack: HistoryStack,
    tol: float = 1e-8,
    feas_tol: float = 1e-6,
    penalty: float = 1e6,
    max_iter: int = 200,
) -> QPResult:
    """Solve the full-history decoder QP.

    Active-set iteration on the box: repeatedly solve the equality-only
    problem with bound-fixed variables eliminated, pin the worst bound
    violator, and release fixed variables with wrong-signed multipliers.
    Histories made inconsistent by measurement noise fall back to the
    penalized form min ||x - x0||^2 + rho ||A x - o||^2 over the box.
    """
    x0 = stack.prior_mean
    A, o = stack.stacked()
    if A.shape[0] == 0:
        return QPResult(np.clip(x0, 0.0, 1.0), True, 0, False)

    # consistency probe: can the equality system be met at all?
    x_ls = np.linalg.lstsq(A, o, rcond=None)[0]
    if np.linalg.norm(A @ x_ls - o, ord=np.inf) > feas_tol:
        return _solve_penalized(A, o, x0, penalty)

    n = stack.n_cells
    fixed_lo = np.zeros(n, dtype=bool)
    fixed_hi = np.zeros(n, dtype=bool)
    for it in range(1, max_iter + 1):
        x, lam, free = _equality_step(A, o, x0, fixed_lo, fixed_hi)
        below = free & (x < -tol)
        above = free & (x > 1.0 + tol)
        if below.any() or above.any():
            # pin the single worst violator and re-solve
            viol = np.where(below, -x, 0.0) + np.where(above, x - 1.0, 0.0)
            worst = int(np.argmax(viol))
            if below[worst]:
                fixed_lo[worst] = True
            else:
                fixed_hi[worst] = True
            continue
        # KKT stationarity: x - x0 + A^T nu - mu_lo + mu_hi = 0, nu = -lam
        grad = x - x0 - A.T @ lam
        release_lo = fixed_lo & (grad < -tol)  # mu_lo = grad must be >= 0
        release_hi = fixed_hi & (grad > tol)  # mu_hi = -grad must be >= 0
        if release_lo.any() or release_hi.any():
            mags = np.where(release_lo, -grad, 0.0) + np.where(release_hi, grad, 0.0)
            worst = int(np.argmax(mags))
            fixed_lo[worst] = False
            fixed_hi[worst] = False
            continue
        return QPResult(np.clip(x, 0.0, 1.0), True, it, False)
    return QPResult(np.clip(x, 0.0, 1.0), True, max_iter, False)


def _solve_penalized(A, o, x0, penalty) -> QPResult:
    """Box-constrained least squares min ||x-x0||^2 + rho ||Ax-o||^2."""
    root = np.sqrt(penalty)
    design = np.vstack([np.eye(len(x0)), root * A])
    target = np.concatenate([x0, root * o])
    res = lsq_linear(design, target, bounds=(0.0, 1.0), method="trf")
    return QPResult(np.clip(res.x, 0.0, 1.0), False, int(res.nit or 0), True)
