"""Iterative map decoder: Kalman updates over touched cells plus clamping.

The belief covariance is materialized only over cells that have appeared in
some observation row; every other cell keeps its scalar prior variance and
prior mean exactly (its Kalman gain rows are provably zero), which keeps
large maps tractable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve, LinAlgError

from .abstraction import ObservationOperator, RAW_SOURCE

__all__ = [
    "NoiseModel",
    "BeliefState",
    "kalman_update",
    "project",
    "actor_decode_step",
    "sensor_decode_step",
    "indices_operator",
    "hypothetical_projected_mean",
]


@dataclass(frozen=True)
class NoiseModel:
    """Isotropic measurement noise V = variance * I, with a regularization
    fallback used when the innovation covariance cannot be factorized."""

    variance: float
    eps_reg: float = 1e-8

    def __post_init__(self):
        if self.variance < 0:
            raise ValueError("noise variance must be non-negative")
        if self.eps_reg <= 0:
            raise ValueError("eps_reg must be positive")


class BeliefState:
    """Gaussian map belief with lazily materialized covariance.

    ``mean`` is the unprojected estimate; the planner consumes
    ``projected_mean`` (elementwise clamp onto [0, 1]).
    """

    def __init__(
        self,
        n_cells: int,
        prior_mean: float,
        prior_var: float = 1.0,
        materialize: bool = False,
    ):
        self.n_cells = n_cells
        self.prior_mean = float(prior_mean)
        self.prior_var = float(prior_var)
        self.mean = np.full(n_cells, float(prior_mean))
        if materialize:
            # dense prior covariance up front: per-step cost is then
            # independent of how many updates have been applied
            self._touched = list(range(n_cells))
            self._pos = {c: c for c in range(n_cells)}
            self.cov = np.eye(n_cells) * float(prior_var)
        else:
            self._touched: list[int] = []
            self._pos: dict[int, int] = {}
            self.cov = np.empty((0, 0))

    @property
    def touched(self) -> frozenset:
        return frozenset(self._touched)

    @property
    def projected_mean(self) -> np.ndarray:
        return project(self.mean)

    def variance_of(self, cell: int) -> float:
        pos = self._pos.get(cell)
        if pos is None:
            return self.prior_var
        return float(self.cov[pos, pos])

    def copy(self) -> "BeliefState":
        dup = BeliefState.__new__(BeliefState)
        dup.n_cells = self.n_cells
        dup.prior_mean = self.prior_mean
        dup.prior_var = self.prior_var
        dup.mean = self.mean.copy()
        dup._touched = list(self._touched)
        dup._pos = dict(self._pos)
        dup.cov = self.cov.copy()
        return dup

    def _ensure_touched(self, cells: np.ndarray) -> np.ndarray:
        """Grow the covariance block to cover ``cells``; return their block
        positions in ``cells`` order."""
        new = [int(c) for c in cells if int(c) not in self._pos]
        if new:
            t = len(self._touched)
            grown = np.zeros((t + len(new), t + len(new)))
            grown[:t, :t] = self.cov
            for i, c in enumerate(new):
                grown[t + i, t + i] = self.prior_var
                self._pos[c] = t + i
            self._touched.extend(new)
            self.cov = grown
        return np.array([self._pos[int(c)] for c in cells], dtype=np.intp)

    def update(
        self, op: ObservationOperator, obs: np.ndarray, noise: NoiseModel
    ) -> None:
        """In-place Kalman measurement update (mean and covariance)."""
        obs = np.asarray(obs, dtype=float).ravel()
        if obs.size != op.rows:
            raise ValueError(f"expected {op.rows} measurements, got {obs.size}")
        if op.n_cols != self.n_cells:
            raise ValueError("operator dimension does not match belief")
        if not np.all(np.isfinite(obs)):
            raise ValueError("non-finite observation")
        if op.rows == 0:
            return
        sup = op.support
        loc = self._ensure_touched(sup)
        A = op.dense_on(sup)  # rows x |sup|
        cov_cols = self.cov[:, loc]  # T x |sup|
        S = A @ cov_cols[loc, :] @ A.T
        S[np.diag_indices_from(S)] += noise.variance
        cf = _factor_innovation(S, noise)
        PAt = cov_cols @ A.T  # T x rows, equals Sigma A^T
        gain = cho_solve(cf, PAt.T).T  # T x rows
        innovation = obs - A @ self.mean[sup]
        self.mean[self._touched] += gain @ innovation
        self.cov -= gain @ PAt.T
        self.cov = 0.5 * (self.cov + self.cov.T)


def _factor_innovation(S: np.ndarray, noise: NoiseModel):
    """Cholesky of the innovation covariance, escalating a scale-relative
    ridge on failure (an absolute ridge would swamp near-zero-variance
    blocks and bias the gain)."""
    try:
        return cho_factor(S, lower=True)
    except LinAlgError:
        pass
    reg = noise.eps_reg * max(float(S.diagonal().max()), noise.eps_reg)
    eye = np.eye(S.shape[0])
    while True:
        try:
            return cho_factor(S + reg * eye, lower=True)
        except LinAlgError:
            reg *= 100.0


def project(mean: np.ndarray) -> np.ndarray:
    """Clamp an estimate onto [0, 1] elementwise (idempotent)."""
    return np.clip(mean, 0.0, 1.0)


def kalman_update(
    belief: BeliefState,
    op: ObservationOperator,
    obs: np.ndarray,
    noise: NoiseModel,
) -> BeliefState:
    """Pure-functional Kalman update returning a new belief."""
    out = belief.copy()
    out.update(op, obs, noise)
    return out


def indices_operator(cells, n_cols: int) -> ObservationOperator:
    """Raw singleton-row operator over an explicit cell index list."""
    return ObservationOperator(
        n_cols=n_cols,
        row_indices=tuple(np.asarray([int(c)], dtype=np.int64) for c in cells),
        source=RAW_SOURCE,
    )


def actor_decode_step(
    belief: BeliefState,
    actor_op: ObservationOperator,
    actor_obs: np.ndarray,
    noise_actor: NoiseModel,
    template_op: ObservationOperator | None = None,
    template_obs: np.ndarray | None = None,
    noise_channel: NoiseModel | None = None,
) -> BeliefState:
    """One Actor decode step: own-window update, then the received
    abstraction (when present), then projection of the output estimate."""
    out = belief.copy()
    out.update(actor_op, actor_obs, noise_actor)
    if template_op is not None:
        out.update(template_op, template_obs, noise_channel)
    return out


def sensor_decode_step(
    belief: BeliefState,
    sensed_true: np.ndarray,
    actor_overlap_cells,
    noise_actor: NoiseModel,
    template_op: ObservationOperator | None = None,
    template_obs: np.ndarray | None = None,
    noise_channel: NoiseModel | None = None,
) -> BeliefState:
    """Sensor-side decode step.

    When the Actor's explored set overlaps the Sensor's sensed cells, the
    Sensor replays that raw-window update using its own true values under
    the Actor's noise model; then it applies its own abstraction update.
    """
    out = belief.copy()
    overlap = np.asarray(list(actor_overlap_cells), dtype=np.int64)
    if overlap.size:
        op = indices_operator(overlap, belief.n_cells)
        out.update(op, sensed_true[overlap], noise_actor)
    if template_op is not None:
        out.update(template_op, template_obs, noise_channel)
    return out


def hypothetical_projected_mean(
    belief: BeliefState,
    op: ObservationOperator,
    obs: np.ndarray,
    noise: NoiseModel,
) -> np.ndarray:
    """Projected posterior mean if ``obs`` were assimilated, without
    mutating the belief or materializing new covariance.

    Mean-only evaluation: cells outside the current block are uncorrelated
    with everything, so their gain rows reduce to prior_var * A^T S^-1.
    """
    obs = np.asarray(obs, dtype=float).ravel()
    if op.rows == 0:
        return belief.projected_mean
    sup = op.support
    s = len(sup)
    A = op.dense_on(sup)
    known_mask = np.array([int(c) in belief._pos for c in sup], dtype=bool)
    loc = np.array(
        [belief._pos[int(c)] for c in sup[known_mask]], dtype=np.intp
    )
    # Sigma restricted to the support: touched block + prior diagonal
    sigma_ss = np.zeros((s, s))
    if loc.size:
        sigma_ss[np.ix_(known_mask, known_mask)] = belief.cov[np.ix_(loc, loc)]
    new_idx = np.where(~known_mask)[0]
    sigma_ss[new_idx, new_idx] = belief.prior_var
    S = A @ sigma_ss @ A.T
    S[np.diag_indices_from(S)] += noise.variance
    cf = _factor_innovation(S, noise)
    innovation = obs - A @ belief.mean[sup]
    w = cho_solve(cf, innovation)  # S^-1 (o - A mean)
    mean = belief.mean.copy()
    if len(belief._touched):
        cov_cols = np.zeros((len(belief._touched), s))
        if loc.size:
            cov_cols[:, known_mask] = belief.cov[:, loc]
        mean[belief._touched] += cov_cols @ (A.T @ w)
    if new_idx.size:
        delta_new = belief.prior_var * (A[:, new_idx].T @ w)
        mean[sup[new_idx]] += delta_new
    return project(mean)
