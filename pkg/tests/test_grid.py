import numpy as np
import pytest

from mapcomm.grid import (
    GridMap,
    RasterFormatError,
    depth_to_inclination,
    load_raster,
    window_at,
)


def _write_text(tmp_path, rows, cols, values, name="map.txt"):
    path = tmp_path / name
    body = f"{rows} {cols}\n" + "\n".join(
        " ".join(str(v) for v in row) for row in values
    )
    path.write_text(body + "\n")
    return path


class TestLoadRaster:
    def test_rescales_to_unit_interval(self, tmp_path):
        path = _write_text(tmp_path, 2, 2, [[0, 5], [10, 10]])
        grid = load_raster(path)
        assert np.allclose(grid.values, [0.0, 0.5, 1.0, 1.0])

    def test_constant_raster_maps_to_zeros(self, tmp_path):
        path = _write_text(tmp_path, 1, 3, [[7, 7, 7]])
        grid = load_raster(path)
        assert np.array_equal(grid.values, np.zeros(3))

    def test_distinct_integers_linear(self, tmp_path):
        values = [[1, 2, 3], [4, 5, 6], [7, 8, 9]]
        grid = load_raster(_write_text(tmp_path, 3, 3, values))
        expected = (np.arange(1, 10) - 1) / 8
        assert np.allclose(grid.values, expected)

    def test_parse_error_reports_line(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("2 2\n0 1\nx 3\n")
        with pytest.raises(RasterFormatError, match="line 3"):
            load_raster(path)

    def test_wrong_count_rejected(self, tmp_path):
        path = tmp_path / "short.txt"
        path.write_text("2 2\n0 1 2\n")
        with pytest.raises(RasterFormatError):
            load_raster(path)

    def test_pgm_roundtrip(self, tmp_path):
        path = tmp_path / "map.pgm"
        pixels = np.array([[0, 128], [255, 64]], dtype=np.uint8)
        path.write_bytes(b"P5\n2 2\n255\n" + pixels.tobytes())
        grid = load_raster(path, format="pgm")
        assert grid.shape == (2, 2)
        assert np.isclose(grid.values.max(), 1.0)
        assert np.isclose(grid.values.min(), 0.0)

    def test_output_always_in_unit_interval(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            rows, cols = rng.integers(1, 8, size=2)
            raw = rng.normal(scale=100.0, size=(rows, cols))
            scaled = raw - raw.min()
            if scaled.max() > 0:
                scaled = scaled / scaled.max()
            grid = GridMap(width=int(cols), height=int(rows), values=scaled.ravel())
            assert grid.values.min() >= 0.0 and grid.values.max() <= 1.0


class TestDepthToInclination:
    def test_constant_depth_is_all_zero(self):
        with pytest.warns(UserWarning):
            grid = depth_to_inclination(np.full((3, 3), 2.5))
        assert np.array_equal(grid.values, np.zeros(9))

    def test_two_cell_tie_normalizes_to_zero(self):
        # both cells see the same |difference| so the normalization flattens
        grid = depth_to_inclination(np.array([[0.0, 1.0]]))
        assert np.array_equal(grid.values, np.zeros(2))

    def test_raised_center_has_maximal_inclination(self):
        depth = np.zeros((3, 3))
        depth[1, 1] = 5.0
        grid = depth_to_inclination(depth)
        # brute-force the formula to locate the true argmax
        z = np.zeros((3, 3))
        for r in range(3):
            for c in range(3):
                for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
                    if 0 <= r + dr < 3 and 0 <= c + dc < 3:
                        z[r, c] += abs(depth[r, c] - depth[r + dr, c + dc])
        assert z.argmax() == 4
        assert grid.values[4] == 1.0

    def test_invariance_to_shift_and_scale(self):
        rng = np.random.default_rng(3)
        depth = rng.uniform(size=(5, 6))
        base = depth_to_inclination(depth).values
        shifted = depth_to_inclination(depth + 17.0).values
        scaled = depth_to_inclination(depth * 3.5).values
        assert np.allclose(base, shifted)
        assert np.allclose(base, scaled)


class TestWindowAt:
    @pytest.fixture
    def grid5(self):
        return GridMap(width=5, height=5, values=np.zeros(25))

    def test_interior_window_full(self, grid5):
        win = window_at(grid5, (2, 2), 3, 3)
        expected = [r * 5 + c for r in (1, 2, 3) for c in (1, 2, 3)]
        assert win.cell_indices.tolist() == expected

    def test_corner_window_clipped(self, grid5):
        win = window_at(grid5, (0, 0), 3, 3)
        assert win.cell_indices.tolist() == [0, 1, 5, 6]

    def test_large_map_five_by_five(self):
        grid = GridMap(width=128, height=128, values=np.zeros(128 * 128))
        win = window_at(grid, (12, 57), 5, 5)
        assert len(win) == 25

    def test_center_out_of_bounds_rejected(self, grid5):
        with pytest.raises(ValueError):
            window_at(grid5, (5, 0), 3, 3)

    def test_clipped_window_is_bounds_intersection(self):
        rng = np.random.default_rng(1)
        grid = GridMap(width=7, height=6, values=np.zeros(42))
        for _ in range(100):
            center = (int(rng.integers(6)), int(rng.integers(7)))
            w, h = int(rng.integers(1, 6)), int(rng.integers(1, 6))
            win = window_at(grid, center, w, h)
            r0 = center[0] - (h - 1) // 2
            c0 = center[1] - (w - 1) // 2
            expected = sorted(
                r * 7 + c
                for r in range(r0, r0 + h)
                for c in range(c0, c0 + w)
                if 0 <= r < 6 and 0 <= c < 7
            )
            assert sorted(win.cell_indices.tolist()) == expected
            if 0 <= r0 and r0 + h <= 6 and 0 <= c0 and c0 + w <= 7:
                assert len(win) == w * h


class TestGridMap:
    def test_index_position_bijection(self):
        grid = GridMap(width=4, height=3, values=np.zeros(12))
        seen = set()
        for i in range(12):
            pos = grid.position_of(i)
            assert grid.index_of(pos) == i
            seen.add(pos)
        assert len(seen) == 12

    def test_rejects_out_of_range_values(self):
        with pytest.raises(ValueError):
            GridMap(width=2, height=1, values=np.array([0.5, 1.5]))
