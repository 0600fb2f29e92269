"""Cell-partitioned point sets on the unit square and fixed-radius queries.

The unit square is cut into q x q square cells of side delta_cell.  Points
are stored in a single array ordered so that every cell owns one contiguous
index range, described by an offset table of length q*q + 1.  A closed-ball
range query then only scans the cells that can intersect the ball, which is
a constant number of cells when the query radius matches the cell side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


def subdomain_radius(d: int) -> float:
    """Covering radius sqrt(2/d) for d subdomain centers in the unit square."""
    if d < 1:
        raise ValueError(f"subdomain count must be at least 1, got {d}")
    return math.sqrt(2.0 / d)


def strip_count(delta: float) -> int:
    """Number of strips q = ceil(1/delta) per coordinate axis."""
    if delta <= 0.0:
        raise ValueError(f"strip width must be positive, got {delta}")
    return max(1, math.ceil(1.0 / delta))


def _strip(coord: float, delta_cell: float, q: int) -> int:
    # Division by a positive constant and floor are both monotone, so
    # strip indices never invert the order of coordinates.  Coordinates
    # exactly at 1.0 would index strip q + 1 and are clamped into q.
    return min(int(math.floor(coord / delta_cell)) + 1, q)


def cell_index(p, q: int, delta_cell: float) -> tuple[int, int]:
    """1-based cell (v, w) of a point, v along x and w along y."""
    x, y = float(p[0]), float(p[1])
    if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
        raise ValueError(f"point ({x}, {y}) lies outside the unit square")
    return _strip(x, delta_cell, q), _strip(y, delta_cell, q)


def as_unit_square(points, what: str = "point") -> np.ndarray:
    """Return points as an (n, 2) float array, rejecting out-of-domain rows."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.size == 0:
        return pts.reshape(0, 2)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError(f"expected shape (n, 2), got {pts.shape}")
    inside = (
        (pts[:, 0] >= 0.0)
        & (pts[:, 0] <= 1.0)
        & (pts[:, 1] >= 0.0)
        & (pts[:, 1] <= 1.0)
    )
    if not inside.all():
        i = int(np.flatnonzero(~inside)[0])
        raise ValueError(
            f"{what} {i} = ({pts[i, 0]}, {pts[i, 1]}) lies outside the unit square"
        )
    return pts


@dataclass(frozen=True)
class CellGrid:
    """Offset-table storage for points bucketed into q x q cells.

    sorted_points holds the input points reordered cell by cell: all
    points of cell (v, w) sit in
    sorted_points[cell_start[k] : cell_start[k + 1]] with
    k = (w - 1) * q + (v - 1).  Within a y-strip points are ordered by x,
    ties broken by y and then by original position, so two builds of the
    same input are identical.  perm maps sorted positions back to indices
    into the original input array.
    """

    q: int
    delta_cell: float
    sorted_points: np.ndarray
    cell_start: np.ndarray
    perm: np.ndarray
    # query-time scratch derived from the public fields: the same data as
    # one contiguous (n, 3) table of x, y, original index (plus a plain
    # nested-list copy) and the offsets as a plain list, cheaper to slice
    # per query than the column arrays
    _table: np.ndarray = field(init=False, repr=False, compare=False)
    _rows: list = field(init=False, repr=False, compare=False)
    _starts: list = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        table = np.empty((len(self.sorted_points), 3), dtype=np.float64)
        table[:, :2] = self.sorted_points
        table[:, 2] = self.perm
        object.__setattr__(self, "_table", table)
        object.__setattr__(self, "_rows", table.tolist())
        object.__setattr__(self, "_starts", self.cell_start.tolist())

    @property
    def n(self) -> int:
        return len(self.sorted_points)


def build_cell_grid(points, delta: float) -> CellGrid:
    """Bucket points (all inside the unit square) into cells of side delta."""
    pts = as_unit_square(points)
    q = strip_count(delta)
    n = len(pts)
    if n == 0:
        return CellGrid(
            q=q,
            delta_cell=float(delta),
            sorted_points=pts,
            cell_start=np.zeros(q * q + 1, dtype=np.int64),
            perm=np.zeros(0, dtype=np.int64),
        )
    v = np.minimum(np.floor(pts[:, 0] / delta).astype(np.int64) + 1, q)
    w = np.minimum(np.floor(pts[:, 1] / delta).astype(np.int64) + 1, q)
    lin = (w - 1) * q + (v - 1)
    order = np.lexsort((pts[:, 1], pts[:, 0], lin))
    counts = np.bincount(lin, minlength=q * q)
    cell_start = np.zeros(q * q + 1, dtype=np.int64)
    np.cumsum(counts, out=cell_start[1:])
    return CellGrid(
        q=q,
        delta_cell=float(delta),
        sorted_points=pts[order],
        cell_start=cell_start,
        perm=order.astype(np.int64),
    )


def cell_window(grid: CellGrid, center, radius: float) -> tuple[int, int, int, int]:
    """Inclusive cell window (v_lo, v_hi, w_lo, w_hi) a query must scan.

    The window is derived from the ball's bounding box.  Strip lookup is
    monotone in the coordinate, so every in-ball point lands inside the
    window; with radius equal to the cell side it spans at most 3 x 3
    cells before clamping at the domain boundary.
    """
    if radius < 0.0:
        raise ValueError(f"query radius must be nonnegative, got {radius}")
    cx, cy = float(center[0]), float(center[1])
    q, delta = grid.q, grid.delta_cell
    v_lo = max(1, int(math.floor((cx - radius) / delta)) + 1)
    v_hi = min(q, int(math.floor((cx + radius) / delta)) + 1)
    w_lo = max(1, int(math.floor((cy - radius) / delta)) + 1)
    w_hi = min(q, int(math.floor((cy + radius) / delta)) + 1)
    return v_lo, v_hi, w_lo, w_hi


def cells_examined(grid: CellGrid, center, radius: float) -> int:
    """Number of cells a range query at this center and radius scans."""
    v_lo, v_hi, w_lo, w_hi = cell_window(grid, center, radius)
    if v_lo > v_hi or w_lo > w_hi:
        return 0
    return (v_hi - v_lo + 1) * (w_hi - w_lo + 1)


_EMPTY_INDICES = np.zeros(0, dtype=np.int64)

# candidate count below which a plain Python loop beats numpy's fixed
# per-operation overhead
_SCALAR_CUTOFF = 48


def range_query(grid: CellGrid, center, radius: float) -> np.ndarray:
    """Original indices of all points within radius of center, ascending.

    Membership is the closed ball: points at distance exactly radius are
    included.  Only the cells of the query window are scanned.
    """
    v_lo, v_hi, w_lo, w_hi = cell_window(grid, center, radius)
    if v_lo > v_hi or w_lo > w_hi or grid.n == 0:
        return _EMPTY_INDICES
    q = grid.q
    starts = grid._starts
    spans = []
    count = 0
    for w in range(w_lo, w_hi + 1):
        row = (w - 1) * q
        a = starts[row + v_lo - 1]
        b = starts[row + v_hi]
        if b > a:
            spans.append((a, b))
            count += b - a
    if count == 0:
        return _EMPTY_INDICES
    cx, cy = float(center[0]), float(center[1])
    r2 = radius * radius
    # Python floats and float64 share IEEE double arithmetic, so the scalar
    # loop used for small candidate sets decides membership bit-identically
    # to the vectorized branch below.
    if count <= _SCALAR_CUTOFF:
        rows = grid._rows
        hits = []
        for a, b in spans:
            for x, y, i in rows[a:b]:
                dx = x - cx
                dy = y - cy
                if dx * dx + dy * dy <= r2:
                    hits.append(i)
        hits.sort()
        return np.array(hits, dtype=np.int64)
    table = grid._table
    cand = (
        table[spans[0][0] : spans[0][1]]
        if len(spans) == 1
        else np.concatenate([table[a:b] for a, b in spans])
    )
    dx = cand[:, 0] - cx
    dy = cand[:, 1] - cy
    hit = dx * dx + dy * dy <= r2
    out = cand[hit, 2].astype(np.int64)
    out.sort()
    return out


def brute_force_range_query(points, center, radius: float) -> np.ndarray:
    """Linear-scan reference: ascending indices of points in the closed ball."""
    if radius < 0.0:
        raise ValueError(f"query radius must be nonnegative, got {radius}")
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    dx = pts[:, 0] - float(center[0])
    dy = pts[:, 1] - float(center[1])
    return np.flatnonzero(dx * dx + dy * dy <= radius * radius).astype(np.int64)
