"""Scenario orchestration: the Actor-Sensor loop, metrics, and traces."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .abstraction import Codebook, instantiate_operator, raw_window_operator
from .channel import RngStreams, transmit
from .encoder import EncoderParams, select_abstraction
from .estimator import BeliefState, NoiseModel, indices_operator
from .grid import GridMap, window_at
from .oracle import HistoryStack, solve_history_qp
from .planner import Path, PlannerParams, plan
from .relevance import path_weights

__all__ = [
    "FRAMEWORKS",
    "ScenarioConfig",
    "StepRecord",
    "RunMetrics",
    "run_scenario",
    "accumulated_cost",
    "cost_ratio",
    "bits_ratio",
    "lawnmower_path",
    "moving_target_trace",
    "straight_line_path",
]

FRAMEWORKS = ("U", "AS", "FI")


@dataclass
class ScenarioConfig:
    """Everything one run needs; paired runs share map, seed, and target."""

    grid: GridMap
    framework: str
    codebook: Codebook
    seed: int = 0
    actor_start: tuple[int, int] = (0, 0)
    actor_window: tuple[int, int] = (5, 5)  # (w, h)
    actor_noise_var: float = 1e-5
    sensor_start: tuple[int, int] = (0, 0)
    sensor_horizon: int = 0
    stripe_spacing: int = 1
    channel_noise_var: float = 1e-4
    target: tuple[int, int] = (0, 0)
    target_moves: bool = False
    prior_mean: float = 0.2
    prior_var: float = 1.0
    movement_penalty: float = 0.025
    feasibility_threshold: float = 0.201
    sigma: float = 20.0
    lambda_coefficient: float = 0.02
    squared_weights: bool = True
    step_cap: int | None = None
    decoder: str = "iterative"  # or "qp"
    dense_belief: bool = False
    eps_reg: float = 1e-8

    def __post_init__(self):
        if self.framework not in FRAMEWORKS:
            raise ValueError(f"framework must be one of {FRAMEWORKS}")
        if self.decoder not in ("iterative", "qp"):
            raise ValueError("decoder must be 'iterative' or 'qp'")
        for name, pos in (
            ("actor_start", self.actor_start),
            ("sensor_start", self.sensor_start),
            ("target", self.target),
        ):
            if not self.grid.in_bounds(pos):
                raise ValueError(f"{name} {pos} outside map")
        if self.sensor_horizon < 0:
            raise ValueError("sensor_horizon must be non-negative")
        if not self.prior_mean < self.feasibility_threshold:
            raise ValueError(
                "feasibility_threshold must exceed the prior mean"
            )
        if self.step_cap is None:
            self.step_cap = 20 * (self.grid.width + self.grid.height)
        if self.step_cap <= 0:
            raise ValueError("step_cap must be positive")

    @property
    def planner_params(self) -> PlannerParams:
        return PlannerParams(
            movement_penalty=self.movement_penalty,
            feasibility_threshold=self.feasibility_threshold,
            n_cells=self.grid.n_cells,
        )

    @property
    def encoder_params(self) -> EncoderParams:
        return EncoderParams(
            lambda_coefficient=self.lambda_coefficient,
            squared_weights=self.squared_weights,
        )


@dataclass(frozen=True)
class StepRecord:
    t: int
    actor_pos: tuple[int, int]
    sensor_pos: tuple[int, int] | None
    target_pos: tuple[int, int]
    theta: int | None  # template id, -1 for raw, None when silent
    bits_step: int
    plan_cost: float


@dataclass
class RunMetrics:
    cost: float
    bits: int
    steps: int
    reached: bool
    decoder_seconds: list = field(default_factory=list)
    trace: list = field(default_factory=list)
    traversed: list = field(default_factory=list)
    belief_snapshots: dict = field(default_factory=dict)


def straight_line_path(start: tuple[int, int], goal: tuple[int, int]) -> list:
    """Provisional L-shaped 4-connected path: rows first, then columns."""
    r, c = start
    gr, gc = goal
    cells = [(r, c)]
    while r != gr:
        r += 1 if gr > r else -1
        cells.append((r, c))
    while c != gc:
        c += 1 if gc > c else -1
        cells.append((r, c))
    return cells


def lawnmower_path(
    start: tuple[int, int],
    map_dims: tuple[int, int],
    stripe_spacing: int = 1,
    horizon: int = 0,
    margin: int = 0,
) -> list:
    """Boustrophedon sweep from ``start``, one cell per step.

    The sweep stays inside the band ``margin`` cells from each border (so a
    centered sensing window is never clipped) and returns ``horizon + 1``
    positions for timesteps 0..horizon.
    """
    rows, cols = map_dims
    lo_r, hi_r = margin, rows - 1 - margin
    lo_c, hi_c = margin, cols - 1 - margin
    if lo_r > hi_r or lo_c > hi_c:
        raise ValueError("margin leaves no sweepable band")
    r = min(max(start[0], lo_r), hi_r)
    c = min(max(start[1], lo_c), hi_c)
    out = [(r, c)]
    dir_h, dir_v = 1, 1
    vertical_left = 0
    while len(out) < horizon + 1:
        if vertical_left > 0:
            nr = r + dir_v
            if nr < lo_r or nr > hi_r:
                dir_v = -dir_v
                nr = r + dir_v
                if nr < lo_r or nr > hi_r:
                    nr = r  # single-row band
            r = nr
            vertical_left -= 1
            if vertical_left == 0:
                dir_h = -dir_h
            out.append((r, c))
        else:
            nc = c + dir_h
            if lo_c <= nc <= hi_c:
                c = nc
                out.append((r, c))
            else:
                vertical_left = stripe_spacing
    return out


def moving_target_trace(
    start: tuple[int, int],
    map_dims: tuple[int, int],
    horizon: int,
    rng: np.random.Generator,
) -> list:
    """Seeded random walk that only moves on even timesteps, staying in
    bounds.  Returns ``horizon + 1`` positions for timesteps 0..horizon."""
    rows, cols = map_dims
    moves = ((-1, 0), (1, 0), (0, -1), (0, 1), (0, 0))
    r, c = start
    out = [(r, c)]
    for t in range(1, horizon + 1):
        if t % 2 == 0:
            options = [
                (r + dr, c + dc)
                for dr, dc in moves
                if 0 <= r + dr < rows and 0 <= c + dc < cols
            ]
            r, c = options[int(rng.integers(len(options)))]
        out.append((r, c))
    return out


def accumulated_cost(traversed, true_values: np.ndarray, width: int, a: float) -> float:
    """Sum of (true value + movement penalty) over all traversed cells,
    duplicates included."""
    return float(
        sum(true_values[r * width + c] + a for r, c in traversed)
    )


def cost_ratio(pairs) -> float:
    """Mean C / C_max over paired runs (baseline: Uninformed)."""
    pairs = list(pairs)
    return float(np.mean([c / c_max for c, c_max in pairs]))


def bits_ratio(pairs) -> float:
    """Mean B / B_max over paired runs (baseline: Fully-Informed)."""
    pairs = list(pairs)
    return float(np.mean([b / b_max for b, b_max in pairs]))


def run_scenario(config: ScenarioConfig, snapshot_every: int = 0) -> RunMetrics:
    """Run one scenario to completion (goal reached or step cap).

    Per timestep: the target moves if scheduled, both agents sense, the
    Sensor (AS/FI, while active) transmits, the Actor decodes, replans from
    its current cell, and moves one cell along the plan.
    """
    grid = config.grid
    dims = grid.shape
    truth = grid.values
    rngs = RngStreams(config.seed)
    noise_actor = NoiseModel(config.actor_noise_var, config.eps_reg)
    noise_channel = NoiseModel(config.channel_noise_var, config.eps_reg)
    planner_params = config.planner_params

    if config.target_moves:
        target_trace = moving_target_trace(
            config.target, dims, config.step_cap, rngs.target
        )
    else:
        target_trace = [config.target] * (config.step_cap + 1)

    sensor_active = config.framework in ("AS", "FI") and config.sensor_horizon > 0
    sensor_path = []
    if sensor_active:
        sw, sh = config.codebook.window_shape
        margin = max((sw - 1) // 2, (sh - 1) // 2)
        sensor_path = lawnmower_path(
            config.sensor_start,
            dims,
            stripe_spacing=config.stripe_spacing,
            horizon=config.sensor_horizon,
            margin=min(margin, (min(dims) - 1) // 2),
        )

    actor_belief = BeliefState(
        grid.n_cells, config.prior_mean, config.prior_var,
        materialize=config.dense_belief,
    )
    sensor_belief = (
        BeliefState(
            grid.n_cells, config.prior_mean, config.prior_var,
            materialize=config.dense_belief,
        )
        if config.framework == "AS"
        else None
    )
    history = (
        HistoryStack(grid.n_cells, np.full(grid.n_cells, config.prior_mean))
        if config.decoder == "qp"
        else None
    )

    actor_seen = np.zeros(grid.n_cells, dtype=bool)
    sensor_seen = np.zeros(grid.n_cells, dtype=bool)
    overlap_done = np.zeros(grid.n_cells, dtype=bool)

    actor_pos = config.actor_start
    prev_path_cells = straight_line_path(actor_pos, target_trace[0])
    metrics = RunMetrics(cost=0.0, bits=0, steps=0, reached=False)
    metrics.traversed.append(actor_pos)

    for t in range(config.step_cap):
        target_pos = target_trace[t]
        if actor_pos == target_pos:
            metrics.reached = True
            break

        # Actor senses its own window
        aw, ah = config.actor_window
        actor_win = window_at(grid, actor_pos, aw, ah)
        actor_op = raw_window_operator(actor_win, dims)
        actor_obs = truth[actor_win.cell_indices]
        if config.actor_noise_var > 0:
            actor_obs = actor_obs + rngs.actor.normal(
                0.0, np.sqrt(config.actor_noise_var), size=actor_obs.shape
            )
        actor_seen[actor_win.cell_indices] = True

        # Sensor senses, selects, transmits
        theta = None
        transmission = None
        template_op = None
        sensor_pos = None
        if sensor_active and t < config.sensor_horizon:
            sensor_pos = sensor_path[t]
            sw, sh = config.codebook.window_shape
            sensor_win = window_at(grid, sensor_pos, sw, sh)
            sensor_seen[sensor_win.cell_indices] = True
            if config.framework == "FI":
                op = raw_window_operator(sensor_win, dims)
                obs = op.apply(truth)
                transmission = transmit(
                    obs, op, config.codebook, config.channel_noise_var, rngs.channel
                )
                template_op = op
                theta = -1
            else:  # AS
                new_overlap = np.where(actor_seen & sensor_seen & ~overlap_done)[0]
                if new_overlap.size:
                    overlap_op = indices_operator(new_overlap, grid.n_cells)
                    sensor_belief.update(
                        overlap_op, truth[new_overlap], noise_actor
                    )
                    overlap_done[new_overlap] = True
                weights = path_weights(prev_path_cells, dims, config.sigma)
                sensed_cells = np.where(sensor_seen)[0]
                selection = select_abstraction(
                    sensor_belief,
                    truth,
                    sensed_cells,
                    weights,
                    sensor_pos,
                    dims,
                    config.codebook,
                    config.encoder_params,
                    noise_channel,
                )
                theta = selection.theta
                template_op = instantiate_operator(
                    config.codebook.template(theta), dims, sensor_pos
                )
                transmission = transmit(
                    selection.observation,
                    template_op,
                    config.codebook,
                    config.channel_noise_var,
                    rngs.channel,
                )
                # Sensor assimilates its own abstraction, zero noise realization
                sensor_belief.update(
                    template_op, selection.observation, noise_channel
                )
            metrics.bits += transmission.bits

        # Actor decodes and replans
        tic = time.perf_counter()
        if config.decoder == "iterative":
            actor_belief.update(actor_op, actor_obs, noise_actor)
            if template_op is not None:
                actor_belief.update(
                    template_op, transmission.payload, noise_channel
                )
            estimate = actor_belief.projected_mean
        else:
            history.push(actor_op, actor_obs)
            if template_op is not None:
                history.push(template_op, transmission.payload)
            estimate = solve_history_qp(history).x
        metrics.decoder_seconds.append(time.perf_counter() - tic)

        path = plan(estimate, dims, actor_pos, target_pos, planner_params)
        prev_path_cells = list(path.cells)

        if snapshot_every and t % snapshot_every == 0:
            metrics.belief_snapshots[t] = estimate.copy()

        if len(path.cells) > 1:
            actor_pos = path.cells[1]
        metrics.traversed.append(actor_pos)
        metrics.steps = t + 1
        metrics.trace.append(
            StepRecord(
                t=t,
                actor_pos=metrics.traversed[-2],
                sensor_pos=sensor_pos,
                target_pos=target_pos,
                theta=theta,
                bits_step=transmission.bits if transmission else 0,
                plan_cost=path.cost,
            )
        )
        if actor_pos == target_trace[min(t + 1, config.step_cap)]:
            metrics.reached = True
            metrics.steps = t + 1
            break

    metrics.cost = accumulated_cost(
        metrics.traversed, truth, grid.width, config.movement_penalty
    )
    return metrics
