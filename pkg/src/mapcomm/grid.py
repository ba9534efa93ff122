"""Finest-resolution world map, local windows, and raster ingestion."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GridMap",
    "Window",
    "RasterFormatError",
    "RasterDataError",
    "load_raster",
    "depth_to_inclination",
    "window_at",
]


class RasterFormatError(ValueError):
    """Raster file could not be parsed."""


class RasterDataError(ValueError):
    """Raster parsed but contains unusable values (NaN/inf)."""


@dataclass(frozen=True)
class GridMap:
    """Row-major grid of cell values in [0, 1].

    ``values`` has length ``height * width``; cell (r, c) lives at index
    ``r * width + c``.  0 means fully traversable, 1 means blocked.
    """

    width: int
    height: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float).ravel()
        object.__setattr__(self, "values", vals)
        if self.width <= 0 or self.height <= 0:
            raise ValueError("map dimensions must be positive")
        if vals.size != self.width * self.height:
            raise ValueError(
                f"expected {self.width * self.height} values, got {vals.size}"
            )
        if not np.all(np.isfinite(vals)):
            raise RasterDataError("map values must be finite")
        if vals.size and (vals.min() < 0.0 or vals.max() > 1.0):
            raise ValueError("map values must lie in [0, 1]")
        vals.setflags(write=False)

    @property
    def n_cells(self) -> int:
        return self.width * self.height

    @property
    def shape(self) -> tuple[int, int]:
        """(rows, cols)."""
        return (self.height, self.width)

    def index_of(self, pos: tuple[int, int]) -> int:
        r, c = pos
        if not self.in_bounds(pos):
            raise IndexError(f"position {pos} outside {self.height}x{self.width} map")
        return r * self.width + c

    def position_of(self, index: int) -> tuple[int, int]:
        if not 0 <= index < self.n_cells:
            raise IndexError(f"index {index} outside [0, {self.n_cells})")
        return divmod(index, self.width)

    def in_bounds(self, pos: tuple[int, int]) -> bool:
        r, c = pos
        return 0 <= r < self.height and 0 <= c < self.width

    def as_array(self) -> np.ndarray:
        """Values as a (rows, cols) 2-D view."""
        return self.values.reshape(self.height, self.width)


@dataclass(frozen=True)
class Window:
    """A w x h view around ``center``, clipped at map borders.

    ``cell_indices`` lists covered map indices in row-major window order.
    """

    center: tuple[int, int]
    width: int
    height: int
    cell_indices: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.cell_indices)


def _rescale_unit(raw: np.ndarray) -> np.ndarray:
    lo, hi = raw.min(), raw.max()
    if hi == lo:
        return np.zeros_like(raw, dtype=float)
    return (raw - lo) / (hi - lo)


def _parse_text_matrix(path) -> np.ndarray:
    with open(path, "r") as fh:
        header = fh.readline()
        try:
            rows, cols = (int(tok) for tok in header.split())
        except ValueError as exc:
            raise RasterFormatError(
                f"{path}: line 1: expected 'rows cols' header, got {header!r}"
            ) from exc
        data = []
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            try:
                data.extend(float(tok) for tok in line.split())
            except ValueError as exc:
                raise RasterFormatError(f"{path}: line {lineno}: {exc}") from exc
    raw = np.asarray(data, dtype=float)
    if raw.size != rows * cols:
        raise RasterFormatError(
            f"{path}: expected {rows * cols} values, found {raw.size}"
        )
    return raw.reshape(rows, cols)


def _parse_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        blob = fh.read()
    if not blob.startswith(b"P5"):
        raise RasterFormatError(f"{path}: byte 0: missing P5 magic")
    # header tokens: magic, width, height, maxval; '#' comments allowed
    tokens, pos = [], 2
    while len(tokens) < 3:
        while pos < len(blob) and blob[pos : pos + 1].isspace():
            pos += 1
        if pos < len(blob) and blob[pos : pos + 1] == b"#":
            while pos < len(blob) and blob[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(blob) and not blob[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise RasterFormatError(f"{path}: byte {pos}: truncated header")
        tokens.append(blob[start:pos])
    pos += 1  # single whitespace after maxval
    try:
        cols, rows, maxval = (int(t) for t in tokens)
    except ValueError as exc:
        raise RasterFormatError(f"{path}: malformed header {tokens!r}") from exc
    if maxval <= 0 or maxval > 255:
        raise RasterFormatError(f"{path}: unsupported maxval {maxval}")
    pixels = np.frombuffer(blob, dtype=np.uint8, count=rows * cols, offset=pos)
    if pixels.size != rows * cols:
        raise RasterFormatError(
            f"{path}: byte {pos}: expected {rows * cols} pixels, got {pixels.size}"
        )
    return pixels.reshape(rows, cols).astype(float)


def load_raster(path, format: str = "text") -> GridMap:
    """Load a raster file and rescale values linearly onto [0, 1].

    ``format`` is ``"text"`` (header line ``rows cols`` then whitespace
    separated values) or ``"pgm"`` (binary 8-bit graymap).  A constant
    raster maps to all zeros.
    """
    if format == "text":
        raw = _parse_text_matrix(path)
    elif format == "pgm":
        raw = _parse_pgm(path)
    else:
        raise ValueError(f"unknown raster format {format!r}")
    if not np.all(np.isfinite(raw)):
        raise RasterDataError(f"{path}: raster contains non-finite values")
    rows, cols = raw.shape
    return GridMap(width=cols, height=rows, values=_rescale_unit(raw).ravel())


def depth_to_inclination(depth: np.ndarray, neighbors: str = "4") -> GridMap:
    """Convert a raw depth raster into a normalized inclination map.

    Each cell's inclination is the sum of absolute depth differences with
    its in-bounds neighbors, rescaled to [0, 1].  ``neighbors`` selects the
    4- or 8-connected neighborhood.
    """
    depth = np.asarray(depth, dtype=float)
    if depth.ndim != 2 or depth.size == 0:
        raise ValueError("depth raster must be a non-empty 2-D array")
    if neighbors == "4":
        offsets = [(-1, 0), (1, 0), (0, -1), (0, 1)]
    elif neighbors == "8":
        offsets = [
            (dr, dc)
            for dr in (-1, 0, 1)
            for dc in (-1, 0, 1)
            if (dr, dc) != (0, 0)
        ]
    else:
        raise ValueError("neighbors must be '4' or '8'")
    z = np.zeros_like(depth)
    for dr, dc in offsets:
        shifted = np.full_like(depth, np.nan)
        rows, cols = depth.shape
        r0, r1 = max(dr, 0), rows + min(dr, 0)
        c0, c1 = max(dc, 0), cols + min(dc, 0)
        shifted[r0:r1, c0:c1] = depth[r0 - dr : r1 - dr, c0 - dc : c1 - dc]
        diff = np.abs(depth - shifted)
        z += np.where(np.isnan(shifted), 0.0, diff)
    if z.max() == z.min():
        warnings.warn("constant depth map: inclination is all zeros", stacklevel=2)
    rows, cols = depth.shape
    return GridMap(width=cols, height=rows, values=_rescale_unit(z).ravel())


def window_at(
    grid: GridMap, center: tuple[int, int], w: int, h: int
) -> Window:
    """Window of size w x h centered on ``center``, clipped to map bounds."""
    if not grid.in_bounds(center):
        raise ValueError(f"window center {center} outside map")
    if w <= 0 or h <= 0:
        raise ValueError("window dimensions must be positive")
    cr, cc = center
    r0 = cr - (h - 1) // 2
    c0 = cc - (w - 1) // 2
    indices = []
    for r in range(r0, r0 + h):
        if not 0 <= r < grid.height:
            continue
        for c in range(c0, c0 + w):
            if 0 <= c < grid.width:
                indices.append(r * grid.width + c)
    return Window(
        center=center,
        width=w,
        height=h,
        cell_indices=np.asarray(indices, dtype=np.int64),
    )
