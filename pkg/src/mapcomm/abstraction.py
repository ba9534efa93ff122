"""Abstraction codebook: averaging templates, operators, and bit costs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grid import Window

__all__ = [
    "AbstractionTemplate",
    "Codebook",
    "ObservationOperator",
    "instantiate_operator",
    "raw_window_operator",
    "bits_for",
    "builtin_codebook_16",
    "load_codebook",
    "save_codebook",
]


@dataclass(frozen=True)
class AbstractionTemplate:
    """Partition-with-omissions of a sensing window.

    Each block is a frozenset of (row, col) offsets relative to the window's
    top-left cell; the block's cells are transmitted as their average.
    Cells covered by no block carry no information.
    """

    id: int
    window_shape: tuple[int, int]  # (w, h)
    blocks: tuple[frozenset, ...]

    def __post_init__(self):
        w, h = self.window_shape
        seen = set()
        for block in self.blocks:
            if not block:
                raise ValueError(f"template {self.id}: empty block")
            if seen & block:
                raise ValueError(f"template {self.id}: overlapping blocks")
            for r, c in block:
                if not (0 <= r < h and 0 <= c < w):
                    raise ValueError(
                        f"template {self.id}: cell {(r, c)} outside window"
                    )
            seen |= block
        if len(self.blocks) > w * h:
            raise ValueError(f"template {self.id}: more blocks than cells")

    @property
    def k(self) -> int:
        """Compressed-cell count."""
        return len(self.blocks)


@dataclass(frozen=True)
class Codebook:
    """Ordered template set shared by both agents, plus bit pricing."""

    templates: tuple[AbstractionTemplate, ...]
    n_m: int = 12  # bits per transmitted measurement
    n_a: int = 4  # bits for the template index

    def __post_init__(self):
        ids = [t.id for t in self.templates]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate template ids")
        shapes = {t.window_shape for t in self.templates}
        if len(shapes) > 1:
            raise ValueError("templates must share one window shape")
        if self.templates and self.n_a < math.ceil(math.log2(len(self.templates))):
            raise ValueError("n_a too small to index the codebook")

    @property
    def window_shape(self) -> tuple[int, int]:
        return self.templates[0].window_shape

    def __len__(self) -> int:
        return len(self.templates)

    def template(self, theta: int) -> AbstractionTemplate:
        for t in self.templates:
            if t.id == theta:
                return t
        raise KeyError(f"no template with id {theta}")


RAW_SOURCE = "raw"


@dataclass(frozen=True)
class ObservationOperator:
    """Sparse row-averaging operator mapping map values to measurements.

    Row i averages the map cells in ``row_indices[i]`` with equal weights
    summing to one.  ``source`` is a template id or ``RAW_SOURCE``.
    """

    n_cols: int
    row_indices: tuple = field(repr=False)
    source: object = RAW_SOURCE

    @property
    def rows(self) -> int:
        return len(self.row_indices)

    @property
    def support(self) -> np.ndarray:
        """Unique covered map indices, in order of first appearance."""
        if not self.row_indices:
            return np.empty(0, dtype=np.int64)
        cat = np.concatenate(self.row_indices)
        _, order = np.unique(cat, return_index=True)
        return cat[np.sort(order)]

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Exact measurement A x for a full map vector."""
        return np.array([x[idx].mean() for idx in self.row_indices])

    def dense_on(self, columns: np.ndarray) -> np.ndarray:
        """Dense (rows x len(columns)) restriction of the operator.

        ``columns`` must contain every index in the operator's support.
        """
        colpos = {int(c): i for i, c in enumerate(columns)}
        out = np.zeros((self.rows, len(columns)))
        for i, idx in enumerate(self.row_indices):
            w = 1.0 / len(idx)
            for j in idx:
                out[i, colpos[int(j)]] = w
        return out

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.rows, self.n_cols))
        for i, idx in enumerate(self.row_indices):
            out[i, idx] = 1.0 / len(idx)
        return out


def instantiate_operator(
    template: AbstractionTemplate,
    map_dims: tuple[int, int],
    sensor_pos: tuple[int, int],
) -> ObservationOperator:
    """Place a template's averaging blocks on the map around ``sensor_pos``.

    Blocks are clipped at map borders; fully clipped blocks are dropped so
    the realized k may be smaller than the template's.
    """
    rows, cols = map_dims
    cr, cc = sensor_pos
    if not (0 <= cr < rows and 0 <= cc < cols):
        raise ValueError(f"sensor position {sensor_pos} outside map")
    w, h = template.window_shape
    r0 = cr - (h - 1) // 2
    c0 = cc - (w - 1) // 2
    row_indices = []
    for block in template.blocks:
        idx = [
            (r0 + br) * cols + (c0 + bc)
            for br, bc in sorted(block)
            if 0 <= r0 + br < rows and 0 <= c0 + bc < cols
        ]
        if idx:
            row_indices.append(np.asarray(idx, dtype=np.int64))
    return ObservationOperator(
        n_cols=rows * cols, row_indices=tuple(row_indices), source=template.id
    )


def raw_window_operator(window: Window, map_dims: tuple[int, int]) -> ObservationOperator:
    """One singleton row per window cell (full-resolution observation)."""
    rows, cols = map_dims
    return ObservationOperator(
        n_cols=rows * cols,
        row_indices=tuple(
            np.asarray([int(i)], dtype=np.int64) for i in window.cell_indices
        ),
        source=RAW_SOURCE,
    )


def bits_for(op: ObservationOperator, codebook: Codebook) -> int:
    """Bits to transmit a realized observation.

    Template transmissions cost ``k * n_m + n_a``; raw (fully-informed)
    transmissions cost ``k * n_m`` since no index is sent.
    """
    if op.source == RAW_SOURCE:
        return op.rows * codebook.n_m
    return op.rows * codebook.n_m + codebook.n_a


def _rect(r0: int, c0: int, h: int, w: int) -> frozenset:
    return frozenset((r, c) for r in range(r0, r0 + h) for c in range(c0, c0 + w))


def _tiling(h: int, w: int, bh: int, bw: int, r0: int = 0, c0: int = 0) -> list:
    return [
        _rect(r0 + i * bh, c0 + j * bw, bh, bw)
        for i in range(h // bh)
        for j in range(w // bw)
    ]


def builtin_codebook_16(n_m: int = 12, n_a: int = 4) -> Codebook:
    """The canonical 16-template set on a 15 x 15 window.

    Mix of full resolution, uniform coarsenings, directional stripes,
    halves/quadrants, and partial-coverage variants (uncovered cells carry
    no information).  Template 6 has k=9; templates 4 and 5 have k=15.
    """
    shape = (15, 15)

    def t(tid, blocks):
        return AbstractionTemplate(id=tid, window_shape=shape, blocks=tuple(blocks))

    templates = (
        t(1, _tiling(15, 15, 1, 1)),                       # full resolution, k=225
        t(2, _tiling(15, 15, 3, 3)),                       # 3x3 blocks, k=25
        t(3, _tiling(15, 15, 5, 5)),                       # 5x5 blocks, k=9
        t(4, _tiling(15, 15, 1, 15)),                      # row stripes, k=15
        t(5, _tiling(15, 15, 15, 1)),                      # column stripes, k=15
        t(6, _tiling(9, 9, 3, 3, r0=3, c0=3)),             # center 9x9 in 3x3 blocks, k=9
        t(7, [_rect(0, 0, 15, 15)]),                       # single full average, k=1
        t(8, [_rect(0, 0, 7, 15), _rect(8, 0, 7, 15)]),    # top/bottom halves, k=2
        t(9, [_rect(0, 0, 15, 7), _rect(0, 8, 15, 7)]),    # left/right halves, k=2
        t(10, _tiling(5, 5, 1, 1, r0=5, c0=5)),            # center 5x5 full-res, k=25
        t(11, _tiling(5, 5, 1, 1, r0=5, c0=5)              # center full-res + ring, k=26
              + [_rect(0, 0, 15, 15) - _rect(5, 5, 5, 5)]),
        t(12, [_rect(0, 0, 8, 8), _rect(0, 8, 8, 7),       # quadrants, k=4
               _rect(8, 0, 7, 8), _rect(8, 8, 7, 7)]),
        t(13, _tiling(7, 15, 1, 1)),                       # top half full-res, k=105
        t(14, _tiling(7, 15, 1, 1, r0=8)),                 # bottom half full-res, k=105
        t(15, _tiling(15, 7, 1, 1)),                       # left half full-res, k=105
        t(16, _tiling(15, 7, 1, 1, c0=8)),                 # right half full-res, k=105
    )
    return Codebook(templates=templates, n_m=n_m, n_a=n_a)


def save_codebook(codebook: Codebook, path) -> None:
    """Write a codebook in the stanza text format (see ``load_codebook``)."""
    with open(path, "w") as fh:
        fh.write(f"window {codebook.window_shape[0]} {codebook.window_shape[1]}\n")
        fh.write(f"bits_per_measurement {codebook.n_m}\n")
        fh.write(f"bits_per_index {codebook.n_a}\n")
        for t in codebook.templates:
            fh.write(f"\ntemplate {t.id}\n")
            for block in t.blocks:
                cells = " ".join(f"{r},{c}" for r, c in sorted(block))
                fh.write(f"  {cells}\n")


def load_codebook(path) -> Codebook:
    """Parse the stanza text format written by ``save_codebook``.

    Header lines set ``window w h``, ``bits_per_measurement`` and
    ``bits_per_index``; each ``template <id>`` stanza lists one block per
    line as space-separated ``row,col`` offsets.
    """
    window_shape = None
    n_m, n_a = 12, 4
    templates = []
    cur_id, cur_blocks = None, []

    def flush():
        if cur_id is not None:
            templates.append(
                AbstractionTemplate(
                    id=cur_id, window_shape=window_shape, blocks=tuple(cur_blocks)
                )
            )

    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            tokens = line.split()
            if tokens[0] == "window":
                window_shape = (int(tokens[1]), int(tokens[2]))
            elif tokens[0] == "bits_per_measurement":
                n_m = int(tokens[1])
            elif tokens[0] == "bits_per_index":
                n_a = int(tokens[1])
            elif tokens[0] == "template":
                flush()
                cur_id, cur_blocks = int(tokens[1]), []
            else:
                if cur_id is None or window_shape is None:
                    raise ValueError(f"{path}: line {lineno}: block outside template")
                block = frozenset(
                    tuple(int(v) for v in tok.split(",")) for tok in tokens
                )
                cur_blocks.append(block)
    flush()
    return Codebook(templates=tuple(templates), n_m=n_m, n_a=n_a)
