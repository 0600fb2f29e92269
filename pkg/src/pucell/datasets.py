"""Deterministic test inputs: Halton nodes, Franke's surface, uniform grids."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DatasetSpec:
    """Sizes of one experiment: n nodes, d subdomains, s_side^2 grid points."""

    n: int
    d: int
    s_side: int = 33

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"node count must be positive, got {self.n}")
        if self.d < 1:
            raise ValueError(f"subdomain count must be positive, got {self.d}")
        if self.s_side < 2:
            raise ValueError(f"grid side must be at least 2, got {self.s_side}")


def _radical_inverse(indices: np.ndarray, base: int) -> np.ndarray:
    i = indices.copy()
    out = np.zeros(i.shape, dtype=np.float64)
    f = 1.0 / base
    while i.max(initial=0) > 0:
        out += (i % base) * f
        i //= base
        f /= base
    return out


def halton(count: int) -> np.ndarray:
    """First `count` points of the (2, 3)-base Halton sequence, index from 1.

    The points are pairwise distinct and lie strictly inside (0, 1)^2;
    the first point is (1/2, 1/3).
    """
    if count < 1:
        raise ValueError(f"point count must be positive, got {count}")
    idx = np.arange(1, count + 1, dtype=np.int64)
    return np.column_stack((_radical_inverse(idx, 2), _radical_inverse(idx, 3)))


def franke(x, y):
    """Franke's four-hump test surface, the standard benchmark field."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    t1 = 0.75 * np.exp(-((9.0 * x - 2.0) ** 2 + (9.0 * y - 2.0) ** 2) / 4.0)
    t2 = 0.75 * np.exp(-((9.0 * x + 1.0) ** 2) / 49.0 - (9.0 * y + 1.0) / 10.0)
    t3 = 0.5 * np.exp(-((9.0 * x - 7.0) ** 2 + (9.0 * y - 3.0) ** 2) / 4.0)
    t4 = 0.2 * np.exp(-((9.0 * x - 4.0) ** 2) - (9.0 * y - 7.0) ** 2)
    out = t1 + t2 + t3 - t4
    if out.ndim == 0:
        return float(out)
    return out


def grid_points(side: int) -> np.ndarray:
    """Uniform (side x side) grid on [0,1]^2 including the boundary, row-major."""
    if side < 2:
        raise ValueError(f"grid side must be at least 2, got {side}")
    coords = np.arange(side, dtype=np.float64) / (side - 1)
    xs, ys = np.meshgrid(coords, coords, indexing="ij")
    return np.column_stack((xs.ravel(), ys.ravel()))


def grid_centers(count: int) -> np.ndarray:
    """Uniform sqrt(count) x sqrt(count) grid of cell midpoints.

    count must be a perfect square; spacing is 1/sqrt(count) with offset
    1/(2*sqrt(count)), so centers sit at strip midpoints away from the
    domain boundary.
    """
    if count < 1:
        raise ValueError(f"center count must be positive, got {count}")
    m = math.isqrt(count)
    if m * m != count:
        raise ValueError(f"center count must be a perfect square, got {count}")
    coords = (np.arange(m, dtype=np.float64) + 0.5) / m
    xs, ys = np.meshgrid(coords, coords, indexing="ij")
    return np.column_stack((xs.ravel(), ys.ravel()))
