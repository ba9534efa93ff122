import numpy as np
import pytest

from mapcomm.relevance import path_weights


class TestPathWeights:
    def test_path_cells_weigh_one(self):
        path = [(2, 2), (2, 3), (3, 3)]
        field = path_weights(path, (6, 6), sigma=2.0)
        w = field.weights.reshape(6, 6)
        for r, c in path:
            assert w[r, c] == pytest.approx(1.0)

    def test_single_cell_gaussian_profile(self):
        field = path_weights([(5, 5)], (11, 11), sigma=3.0)
        w = field.weights.reshape(11, 11)
        for r in range(11):
            for c in range(11):
                d2 = (r - 5) ** 2 + (c - 5) ** 2
                assert w[r, c] == pytest.approx(np.exp(-d2 / (2 * 3.0**2)))

    def test_uses_nearest_path_cell(self):
        field = path_weights([(0, 0), (0, 9)], (1, 10), sigma=1.0)
        w = field.weights.reshape(1, 10)
        # cell (0, 8) is distance 1 from (0, 9), not 8 from (0, 0)
        assert w[0, 8] == pytest.approx(np.exp(-0.5))

    def test_weights_in_unit_interval(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            cells = [
                (int(rng.integers(8)), int(rng.integers(8)))
                for _ in range(int(rng.integers(1, 6)))
            ]
            field = path_weights(cells, (8, 8), sigma=float(rng.uniform(0.5, 10)))
            assert field.weights.min() > 0.0
            assert field.weights.max() <= 1.0

    def test_monotone_in_distance_along_a_row(self):
        field = path_weights([(0, 0)], (1, 20), sigma=4.0)
        w = field.weights
        assert all(w[i] > w[i + 1] for i in range(19))

    def test_larger_sigma_flattens(self):
        narrow = path_weights([(4, 4)], (9, 9), sigma=1.0).weights
        wide = path_weights([(4, 4)], (9, 9), sigma=8.0).weights
        off = np.ones(81, dtype=bool)
        off[4 * 9 + 4] = False
        assert np.all(wide[off] > narrow[off])

    def test_cutoff_floors_far_cells(self):
        field = path_weights([(0, 0)], (1, 50), sigma=2.0, cutoff_radius=10.0)
        w = field.weights
        floor = np.exp(-(10.0**2) / (2 * 2.0**2))
        assert np.allclose(w[11:], floor)
        assert w[5] == pytest.approx(np.exp(-25 / 8))

    def test_empty_path_rejected(self):
        with pytest.raises(ValueError):
            path_weights([], (4, 4), sigma=1.0)

    def test_bad_sigma_rejected(self):
        with pytest.raises(ValueError):
            path_weights([(0, 0)], (4, 4), sigma=0.0)
