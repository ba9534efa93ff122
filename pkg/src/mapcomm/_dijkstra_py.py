"""Pure-Python Dijkstra kernel (fallback when the compiled one is absent).

Must stay behaviorally identical to ``_dijkstra.pyx``: vertex costs, strict
relaxation, and (distance, row, col) lexicographic pop order so both
kernels return bit-identical paths.
"""

from __future__ import annotations

import heapq

import numpy as np

# neighbor order matches the control set: UP, DOWN, LEFT, RIGHT
_MOVES = ((-1, 0), (1, 0), (0, -1), (0, 1))


def dijkstra_grid(cost: np.ndarray, start: tuple, goal: tuple) -> list:
    """Min vertex-cost path on a 4-connected grid.

    ``cost[r, c]`` is the cost of entering (or starting on) cell (r, c).
    Returns the path as a list of (row, col) from start to goal inclusive;
    the start cell's cost is not included in the accumulated distances
    (callers add it once).
    """
    rows, cols = cost.shape
    sr, sc = start
    gr, gc = goal
    dist = np.full((rows, cols), np.inf)
    prev = np.full((rows, cols), -1, dtype=np.int64)
    done = np.zeros((rows, cols), dtype=bool)
    dist[sr, sc] = 0.0
    heap = [(0.0, sr, sc)]
    while heap:
        d, r, c = heapq.heappop(heap)
        if done[r, c]:
            continue
        done[r, c] = True
        if r == gr and c == gc:
            break
        for dr, dc in _MOVES:
            nr, nc = r + dr, c + dc
            if not (0 <= nr < rows and 0 <= nc < cols) or done[nr, nc]:
                continue
            nd = d + cost[nr, nc]
            if nd < dist[nr, nc]:
                dist[nr, nc] = nd
                prev[nr, nc] = r * cols + c
                heapq.heappush(heap, (nd, nr, nc))
    path = []
    node = gr * cols + gc
    while node != -1:
        path.append((node // cols, node % cols))
        if node == sr * cols + sc:
            break
        node = int(prev[node // cols, node % cols])
    path.reverse()
    return path
