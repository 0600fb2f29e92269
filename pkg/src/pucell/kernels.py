"""Radial basis function kernels and dense interpolation matrices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

GAUSSIAN = "gaussian"
WENDLAND_C2 = "wendland"

_FAMILIES = (GAUSSIAN, WENDLAND_C2)


@dataclass(frozen=True)
class KernelSpec:
    """A kernel family plus its shape parameter.

    For the Gaussian the shape parameter is alpha^2, so
    phi(r) = exp(-shape * r^2).  For the Wendland C2 function it is the
    support scale c, so phi(r) = (1 - c*r)_+^4 * (4*c*r + 1) and phi
    vanishes identically for r >= 1/c.
    """

    family: str
    shape: float

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}")
        if not self.shape > 0.0:
            raise ValueError(f"kernel shape must be positive, got {self.shape}")


def kernel_value(spec: KernelSpec, r):
    """Evaluate phi(r) for a scalar or array of nonnegative distances."""
    arr = np.asarray(r, dtype=np.float64)
    if np.any(arr < 0.0):
        raise ValueError("kernel distances must be nonnegative")
    if spec.family == GAUSSIAN:
        out = np.exp(-spec.shape * arr * arr)
    else:
        t = spec.shape * arr
        base = np.where(t < 1.0, 1.0 - t, 0.0)
        out = base ** 4 * (4.0 * t + 1.0)
    if np.isscalar(r):
        return float(out)
    return out


def kernel_matrix(points, spec: KernelSpec):
    """Dense symmetric matrix a_ij = phi(||x_i - x_j||_2).

    Both kernel families are strictly positive definite on distinct
    points, so the matrix is nonsingular exactly when no two points
    coincide.  Coincident points raise a ValueError naming the pair.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError(f"points must have shape (m, 2), got {pts.shape}")
    dx = pts[:, 0, None] - pts[None, :, 0]
    dy = pts[:, 1, None] - pts[None, :, 1]
    dist = np.sqrt(dx * dx + dy * dy)
    m = len(pts)
    if m > 1:
        off = dist + np.diag(np.full(m, np.inf))
        if np.any(off == 0.0):
            i, j = np.argwhere(off == 0.0)[0]
            raise ValueError(
                f"points {i} and {j} coincide, interpolation matrix would be singular"
            )
    return kernel_value(spec, dist)
