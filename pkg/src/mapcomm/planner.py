"""Actor path planning: cell costs from the current estimate + Dijkstra.

The Dijkstra kernel is the hot loop (a full replan runs every timestep); a
compiled extension is used when available, with a pure-Python fallback
selected at import time.  Both kernels are behaviorally identical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

try:
    from ._dijkstra import dijkstra_grid

    KERNEL = "compiled"
except ImportError:  # pragma: no cover - depends on build environment
    from ._dijkstra_py import dijkstra_grid

    KERNEL = "python"

__all__ = ["PlannerParams", "Path", "cell_cost", "cost_field", "plan", "KERNEL"]


@dataclass(frozen=True)
class PlannerParams:
    """Cost shaping for the planner.

    ``movement_penalty`` is added to every traversed cell; cells whose
    estimate exceeds ``feasibility_threshold`` are priced at
    ``n_cells * (feasibility_threshold + movement_penalty)``, which exceeds
    any all-feasible path's total cost.
    """

    movement_penalty: float
    feasibility_threshold: float
    n_cells: int

    def __post_init__(self):
        if self.movement_penalty <= 0:
            raise ValueError("movement_penalty must be positive")
        if not 0 < self.feasibility_threshold <= 1:
            raise ValueError("feasibility_threshold must be in (0, 1]")

    @property
    def infeasible_cost(self) -> float:
        return self.n_cells * (self.feasibility_threshold + self.movement_penalty)


@dataclass(frozen=True)
class Path:
    """Ordered cells from the current position to the goal, inclusive."""

    cells: tuple
    cost: float

    def __len__(self) -> int:
        return len(self.cells)


def cell_cost(estimate_value: float, params: PlannerParams) -> float:
    """Traversal cost of one cell given its current estimate."""
    if estimate_value <= params.feasibility_threshold:
        return estimate_value + params.movement_penalty
    return params.infeasible_cost


def cost_field(estimate: np.ndarray, shape: tuple[int, int], params: PlannerParams) -> np.ndarray:
    """Vectorized cell costs as a (rows, cols) array."""
    est = np.asarray(estimate, dtype=float).reshape(shape)
    return np.where(
        est <= params.feasibility_threshold,
        est + params.movement_penalty,
        params.infeasible_cost,
    )


def plan(
    estimate: np.ndarray,
    shape: tuple[int, int],
    start: tuple[int, int],
    goal: tuple[int, int],
    params: PlannerParams,
) -> Path:
    """Minimum total vertex-cost 4-connected path from start to goal.

    The returned cost sums cell costs over every path cell, both endpoints
    included.  Ties are broken deterministically by (distance, row, col)
    expansion order inside the kernel.
    """
    rows, cols = shape
    for name, (r, c) in (("start", start), ("goal", goal)):
        if not (0 <= r < rows and 0 <= c < cols):
            raise ValueError(f"{name} {(r, c)} outside {rows}x{cols} map")
    costs = cost_field(estimate, shape, params)
    cells = dijkstra_grid(np.ascontiguousarray(costs, dtype=np.float64), start, goal)
    total = float(sum(costs[r, c] for r, c in cells))
    return Path(cells=tuple(cells), cost=total)
