"""Path converter: Gaussian proximity weights around the Actor's path."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import distance_transform_edt

__all__ = ["WeightField", "path_weights"]


@dataclass(frozen=True)
class WeightField:
    """Per-cell weights in (0, 1]; cells on the path weigh exactly 1."""

    weights: np.ndarray  # length n_cells, row-major
    sigma: float


def path_weights(
    path_cells,
    map_dims: tuple[int, int],
    sigma: float,
    cutoff_radius: float | None = None,
) -> WeightField:
    """Gaussian kernel of distance-to-path, maximized over path cells.

    Distances are Euclidean between cell centers in cell units.  With
    ``cutoff_radius`` set (e.g. 6 * sigma for very large maps), cells
    farther than the cutoff from every path cell keep the kernel value at
    the cutoff instead of their exact value; the error is below
    exp(-cutoff^2 / (2 sigma^2)).
    """
    cells = list(path_cells)
    if not cells:
        raise ValueError("path must be non-empty")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    rows, cols = map_dims
    off_path = np.ones((rows, cols), dtype=bool)
    for pr, pc in cells:
        off_path[pr, pc] = False
    # exact Euclidean distance to the nearest path cell
    dist = distance_transform_edt(off_path)
    if cutoff_radius is not None:
        np.minimum(dist, cutoff_radius, out=dist)
    weights = np.exp(-(dist**2) / (2.0 * sigma**2))
    return WeightField(weights=weights.ravel(), sigma=sigma)
