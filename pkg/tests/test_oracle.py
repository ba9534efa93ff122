import numpy as np
import pytest

from mapcomm.abstraction import ObservationOperator
from mapcomm.estimator import BeliefState, NoiseModel, kalman_update
from mapcomm.oracle import HistoryStack, solve_history_qp


def op_of(blocks, n):
    return ObservationOperator(
        n_cols=n,
        row_indices=tuple(np.asarray(b, dtype=np.int64) for b in blocks),
        source=0,
    )


class TestSolveHistoryQp:
    def test_empty_history_returns_clamped_prior(self):
        stack = HistoryStack(3, np.array([0.5, -0.2, 1.3]))
        res = solve_history_qp(stack)
        assert np.allclose(res.x, [0.5, 0.0, 1.0])
        assert res.feasible

    def test_single_singleton_constraint(self):
        stack = HistoryStack(5, np.full(5, 0.5))
        stack.push(op_of([[3]], 5), np.array([0.7]))
        res = solve_history_qp(stack)
        expected = np.full(5, 0.5)
        expected[3] = 0.7
        assert np.allclose(res.x, expected, atol=1e-8)

    def test_averaging_constraint_shifts_equally(self):
        stack = HistoryStack(4, np.full(4, 0.5))
        stack.push(op_of([[0, 1, 2, 3]], 4), np.array([0.9]))
        res = solve_history_qp(stack)
        assert np.allclose(res.x, np.full(4, 0.9), atol=1e-8)

    def test_solution_stays_in_box(self):
        rng = np.random.default_rng(0)
        for _ in range(30):
            n = int(rng.integers(2, 10))
            truth = rng.uniform(size=n)
            stack = HistoryStack(n, rng.uniform(size=n))
            for _ in range(int(rng.integers(1, 4))):
                size = int(rng.integers(1, n + 1))
                cells = rng.choice(n, size=size, replace=False)
                op = op_of([cells], n)
                stack.push(op, op.apply(truth))
            res = solve_history_qp(stack)
            assert res.x.min() >= -1e-9 and res.x.max() <= 1 + 1e-9

    def test_redundant_constraint_is_noop(self):
        rng = np.random.default_rng(4)
        n = 6
        truth = rng.uniform(size=n)
        stack = HistoryStack(n, np.full(n, 0.5))
        op = op_of([[0, 1], [2, 3, 4]], n)
        stack.push(op, op.apply(truth))
        base = solve_history_qp(stack).x
        stack.push(op, op.apply(truth))  # identical, linearly dependent
        again = solve_history_qp(stack).x
        assert np.allclose(base, again, atol=1e-7)

    def test_inconsistent_history_uses_penalty_fallback(self):
        stack = HistoryStack(3, np.full(3, 0.5))
        stack.push(op_of([[0]], 3), np.array([0.2]))
        stack.push(op_of([[0]], 3), np.array([0.8]))  # contradicts
        res = solve_history_qp(stack)
        assert res.used_penalty_fallback
        assert not res.feasible
        assert 0.0 <= res.x[0] <= 1.0

    def test_matches_kalman_on_interior_noiseless_instances(self):
        rng = np.random.default_rng(8)
        checked = 0
        while checked < 25:
            n = int(rng.integers(2, 12))
            truth = rng.uniform(0.3, 0.7, size=n)
            prior = 0.5
            stack = HistoryStack(n, np.full(n, prior))
            belief = BeliefState(n, prior_mean=prior)
            for _ in range(int(rng.integers(1, 4))):
                size = int(rng.integers(1, min(4, n) + 1))
                cells = rng.choice(n, size=size, replace=False)
                op = op_of([cells], n)
                obs = op.apply(truth)
                stack.push(op, obs)
                belief = kalman_update(belief, op, obs, NoiseModel(0.0))
            res = solve_history_qp(stack)
            if res.x.min() < 1e-3 or res.x.max() > 1 - 1e-3:
                continue  # keep only interior optima
            assert np.allclose(belief.projected_mean, res.x, atol=1e-6)
            checked += 1

    def test_per_step_solve_time_grows_with_history(self):
        import time

        rng = np.random.default_rng(1)
        n = 400
        truth = rng.uniform(size=n)
        stack = HistoryStack(n, np.full(n, 0.5))
        timings = []
        for step in range(60):
            cells = rng.choice(n, size=10, replace=False)
            op = op_of([[c] for c in cells], n)
            stack.push(op, op.apply(truth))
            tic = time.perf_counter()
            solve_history_qp(stack)
            timings.append(time.perf_counter() - tic)
        early = float(np.mean(timings[5:15]))
        late = float(np.mean(timings[-10:]))
        assert late > early
