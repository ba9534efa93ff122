"""Benchmark the compiled Dijkstra kernel against the pure-Python fallback.

Usage: python3 benchmarks/bench_dijkstra.py [--sizes 32,64,128,256] [--reps 5]
"""

import argparse
import time

import numpy as np

from mapcomm._dijkstra_py import dijkstra_grid as dijkstra_py

try:
    from mapcomm._dijkstra import dijkstra_grid as dijkstra_c
except ImportError:
    dijkstra_c = None


def bench(kernel, costs, start, goal, reps):
    best = float("inf")
    for _ in range(reps):
        tic = time.perf_counter()
        path = kernel(costs, start, goal)
        best = min(best, time.perf_counter() - tic)
    return best, path


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="32,64,128,256")
    parser.add_argument("--reps", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    print(f"{'size':>6} {'python (ms)':>12} {'compiled (ms)':>14} {'speedup':>8}")
    for size in (int(s) for s in args.sizes.split(",")):
        costs = np.ascontiguousarray(rng.uniform(0.025, 1.0, size=(size, size)))
        start, goal = (0, 0), (size - 1, size - 1)
        t_py, path_py = bench(dijkstra_py, costs, start, goal, args.reps)
        if dijkstra_c is None:
            print(f"{size:>6} {1e3 * t_py:>12.2f} {'n/a':>14} {'n/a':>8}")
            continue
        t_c, path_c = bench(dijkstra_c, costs, start, goal, args.reps)
        assert list(path_py) == list(path_c), "kernels disagree"
        print(
            f"{size:>6} {1e3 * t_py:>12.2f} {1e3 * t_c:>14.2f} "
            f"{t_py / t_c:>7.1f}x"
        )


if __name__ == "__main__":
    main()
