"""Seeded synthetic worlds: smooth random obstacle fields for benchmarks."""

from __future__ import annotations

import numpy as np
from scipy.ndimage import gaussian_filter

from .grid import GridMap

__all__ = ["smooth_obstacle_map"]


def smooth_obstacle_map(
    rows: int,
    cols: int,
    seed: int,
    n_blobs: int = 12,
    blob_sigma: float = 3.0,
    clear: tuple | None = None,
) -> GridMap:
    """Random field of smooth obstacle blobs, rescaled onto [0, 1].

    ``clear`` optionally lists positions (e.g. start/goal) whose 2-cell
    neighborhoods are flattened toward zero so runs are not born trapped.
    """
    rng = np.random.default_rng(seed)
    field = np.zeros((rows, cols))
    for _ in range(n_blobs):
        r = rng.integers(rows)
        c = rng.integers(cols)
        field[r, c] += rng.uniform(0.5, 1.0)
    field = gaussian_filter(field, sigma=blob_sigma, mode="constant")
    lo, hi = field.min(), field.max()
    if hi > lo:
        field = (field - lo) / (hi - lo)
    if clear:
        for (r, c) in clear:
            r0, r1 = max(r - 2, 0), min(r + 3, rows)
            c0, c1 = max(c - 2, 0), min(c + 3, cols)
            field[r0:r1, c0:c1] *= 0.1
    return GridMap(width=cols, height=rows, values=field.ravel())
