"""Partition-of-unity interpolation from local RBF fits.

Each subdomain is a disk of radius sqrt(2/d) around one of d centers.  A
local RBF interpolant is solved on the nodes inside each disk, and the
global surface blends the local fits with compactly supported weights
normalized to sum to one over the covering subdomains.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .cellgrid import (
    CellGrid,
    as_unit_square,
    brute_force_range_query,
    build_cell_grid,
    range_query,
    subdomain_radius,
)
from .kernels import KernelSpec, kernel_matrix, kernel_value

POLICY_ERROR = "error"
POLICY_NEAREST = "nearest"
SEARCH_CELL = "cell"
SEARCH_BRUTE = "brute"

RESIDUAL_RTOL = 1e-8
_PIVOT_FLOOR = 1e-12


class FitError(RuntimeError):
    """A local interpolation system could not be solved."""


class EmptySubdomainError(FitError):
    """A local fit was requested on an empty node set."""


class IllConditionedError(FitError):
    """A local interpolation matrix is numerically singular."""


class UncoveredPointError(RuntimeError):
    """An evaluation point lies in no fitted subdomain under policy 'error'."""


@dataclass(frozen=True)
class LocalInterpolant:
    """One fitted subdomain: its disk and the RBF coefficients on its nodes."""

    center: np.ndarray
    radius: float
    node_indices: np.ndarray
    coeffs: np.ndarray


@dataclass(frozen=True)
class PUModel:
    kernel: KernelSpec
    nodes: np.ndarray
    values: np.ndarray
    centers: np.ndarray
    radius: float
    locals: list
    fitted: np.ndarray
    policy: str
    search: str
    center_grid: CellGrid | None

    @property
    def empty_count(self) -> int:
        return int(len(self.centers) - np.count_nonzero(self.fitted))


def weight_profile(t):
    """Wendland C2 bump (1-t)_+^4 (4t+1) on the normalized distance t >= 0."""
    t = np.asarray(t, dtype=np.float64)
    base = np.where(t < 1.0, 1.0 - t, 0.0)
    return base ** 4 * (4.0 * t + 1.0)


def weight(p, center, radius: float) -> float:
    """Unnormalized blend weight of a subdomain at point p; 0 outside it."""
    dx = float(p[0]) - float(center[0])
    dy = float(p[1]) - float(center[1])
    return float(weight_profile(np.sqrt(dx * dx + dy * dy) / radius))


def fit_local(nodes, values, kernel: KernelSpec, label: str = "") -> np.ndarray:
    """Solve the local RBF system A c = f on one subdomain's nodes.

    The matrix is symmetric positive definite for distinct nodes, so a
    Cholesky factorization is tried first; if a pivot falls below the
    positivity floor the solve falls back to a pivoted LU factorization.
    One or two steps of iterative refinement are applied when the first
    residual exceeds the target RESIDUAL_RTOL * max(1, ||f||_inf).
    """
    pts = np.asarray(nodes, dtype=np.float64)
    f = np.asarray(values, dtype=np.float64)
    if len(pts) == 0:
        raise EmptySubdomainError(f"subdomain {label or '?'} contains no nodes")
    if len(pts) != len(f):
        raise ValueError(f"{len(pts)} nodes but {len(f)} values")
    a = kernel_matrix(pts, kernel)
    solve = None
    try:
        cf = scipy.linalg.cho_factor(a, lower=True, check_finite=False)
        if float(np.min(np.diagonal(cf[0])) ** 2) >= _PIVOT_FLOOR:
            solve = lambda rhs: scipy.linalg.cho_solve(cf, rhs, check_finite=False)
    except scipy.linalg.LinAlgError:
        pass
    if solve is None:
        try:
            lu = scipy.linalg.lu_factor(a, check_finite=False)
        except scipy.linalg.LinAlgError as exc:
            raise IllConditionedError(
                f"local system {label or '?'} is singular: {exc}"
            ) from exc
        solve = lambda rhs: scipy.linalg.lu_solve(lu, rhs, check_finite=False)
    c = solve(f)
    tol = RESIDUAL_RTOL * max(1.0, float(np.max(np.abs(f))))
    res = float(np.max(np.abs(f - a @ c)))
    for _ in range(2):
        if res <= tol or not np.isfinite(res):
            break
        refined = c + solve(f - a @ c)
        refined_res = float(np.max(np.abs(f - a @ refined)))
        if refined_res >= res:
            break
        c, res = refined, refined_res
    if not np.all(np.isfinite(c)):
        raise IllConditionedError(
            f"local system {label or '?'} is numerically singular"
        )
    return c


def build_pu_model(
    nodes,
    values,
    centers,
    kernel: KernelSpec,
    policy: str = POLICY_NEAREST,
    search: str = SEARCH_CELL,
    workers: int | None = None,
) -> PUModel:
    """Fit all local interpolants and assemble the blended model.

    Subdomains that contain no nodes are kept unfitted and skipped during
    evaluation; building fails only when every subdomain is empty.  With
    workers > 1 the independent local fits run on a thread pool, with
    results identical to the sequential build.
    """
    pts = as_unit_square(nodes, "node")
    f = np.asarray(values, dtype=np.float64)
    ctr = as_unit_square(centers, "center")
    if len(pts) == 0:
        raise ValueError("node set is empty")
    if len(f) != len(pts):
        raise ValueError(f"{len(pts)} nodes but {len(f)} values")
    if len(ctr) == 0:
        raise ValueError("center set is empty")
    if policy not in (POLICY_ERROR, POLICY_NEAREST):
        raise ValueError(f"unknown uncovered-point policy {policy!r}")
    if search not in (SEARCH_CELL, SEARCH_BRUTE):
        raise ValueError(f"unknown search mode {search!r}")
    _reject_duplicate_nodes(pts)

    d = len(ctr)
    radius = subdomain_radius(d)
    if search == SEARCH_CELL:
        node_grid = build_cell_grid(pts, radius)
        query = lambda c: range_query(node_grid, c, radius)
    else:
        query = lambda c: brute_force_range_query(pts, c, radius)

    def fit_one(j: int) -> LocalInterpolant | None:
        idx = query(ctr[j])
        if len(idx) == 0:
            return None
        coeffs = fit_local(pts[idx], f[idx], kernel, label=str(j))
        return LocalInterpolant(ctr[j], radius, idx, coeffs)

    if workers is not None and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            fitted_locals = list(pool.map(fit_one, range(d)))
    else:
        fitted_locals = [fit_one(j) for j in range(d)]

    fitted = np.array([loc is not None for loc in fitted_locals], dtype=bool)
    if not fitted.any():
        raise EmptySubdomainError("every subdomain is empty, no local fits possible")
    center_grid = build_cell_grid(ctr, radius) if search == SEARCH_CELL else None
    return PUModel(
        kernel=kernel,
        nodes=pts,
        values=f,
        centers=ctr,
        radius=radius,
        locals=fitted_locals,
        fitted=fitted,
        policy=policy,
        search=search,
        center_grid=center_grid,
    )


def _reject_duplicate_nodes(pts: np.ndarray) -> None:
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    s = pts[order]
    same = np.flatnonzero((s[1:] == s[:-1]).all(axis=1))
    if same.size:
        i, j = sorted((int(order[same[0]]), int(order[same[0] + 1])))
        raise ValueError(f"nodes {i} and {j} coincide")


def eval_local(local: LocalInterpolant, nodes, kernel: KernelSpec, p) -> float:
    """Evaluate one local RBF interpolant at p (no domain restriction)."""
    pts = np.asarray(nodes, dtype=np.float64)[local.node_indices]
    dx = pts[:, 0] - float(p[0])
    dy = pts[:, 1] - float(p[1])
    phi = kernel_value(kernel, np.sqrt(dx * dx + dy * dy))
    return float(local.coeffs @ phi)


def _covering_indices(model: PUModel, p) -> np.ndarray:
    if model.search == SEARCH_CELL:
        idx = range_query(model.center_grid, p, model.radius)
    else:
        idx = brute_force_range_query(model.centers, p, model.radius)
    return idx[model.fitted[idx]] if len(idx) else idx


def _nearest_fitted(model: PUModel, p) -> int:
    which = np.flatnonzero(model.fitted)
    ctr = model.centers[which]
    dx = ctr[:, 0] - float(p[0])
    dy = ctr[:, 1] - float(p[1])
    return int(which[np.argmin(dx * dx + dy * dy)])


def _eval_one(model: PUModel, p) -> tuple[float, int, bool]:
    cov = _covering_indices(model, p)
    r_count = len(cov)
    if r_count == 1:
        j = int(cov[0])
        return eval_local(model.locals[j], model.nodes, model.kernel, p), 1, False
    if r_count > 1:
        ctr = model.centers[cov]
        dx = ctr[:, 0] - float(p[0])
        dy = ctr[:, 1] - float(p[1])
        wts = weight_profile(np.sqrt(dx * dx + dy * dy) / model.radius)
        wsum = float(wts.sum())
        if wsum > 0.0:
            vals = np.array(
                [
                    eval_local(model.locals[int(j)], model.nodes, model.kernel, p)
                    for j in cov
                ]
            )
            return float((wts / wsum) @ vals), r_count, False
        # All covering centers sit exactly on the ball boundary where the
        # weight vanishes; treat the point like an uncovered one.
    if model.policy == POLICY_ERROR:
        raise UncoveredPointError(
            f"point ({float(p[0])}, {float(p[1])}) lies in no fitted subdomain"
        )
    j = _nearest_fitted(model, p)
    return eval_local(model.locals[j], model.nodes, model.kernel, p), r_count, True


def eval_pu(model: PUModel, p) -> float:
    """Evaluate the blended interpolant at one point of the unit square."""
    x, y = float(p[0]), float(p[1])
    if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
        raise ValueError(f"evaluation point ({x}, {y}) lies outside the unit square")
    value, _, _ = _eval_one(model, p)
    return value


@dataclass(frozen=True)
class EvalReport:
    """Batch evaluation output plus per-point coverage diagnostics."""

    values: np.ndarray
    overlap: np.ndarray
    fallback: np.ndarray

    @property
    def uncovered_count(self) -> int:
        return int(np.count_nonzero(self.fallback))

    @property
    def max_overlap(self) -> int:
        return int(self.overlap.max(initial=0))


def evaluate(model: PUModel, points) -> EvalReport:
    """Evaluate the model at many points, tracking coverage per point."""
    pts = as_unit_square(points, "evaluation point")
    values = np.empty(len(pts), dtype=np.float64)
    overlap = np.empty(len(pts), dtype=np.int64)
    fallback = np.zeros(len(pts), dtype=bool)
    for i, p in enumerate(pts):
        values[i], overlap[i], fallback[i] = _eval_one(model, p)
    return EvalReport(values=values, overlap=overlap, fallback=fallback)


def coverage_weights(model: PUModel, p) -> tuple[np.ndarray, np.ndarray]:
    """Fitted covering subdomains of p and their normalized blend weights."""
    cov = _covering_indices(model, p)
    if len(cov) == 0:
        return cov, np.zeros(0, dtype=np.float64)
    ctr = model.centers[cov]
    dx = ctr[:, 0] - float(p[0])
    dy = ctr[:, 1] - float(p[1])
    wts = weight_profile(np.sqrt(dx * dx + dy * dy) / model.radius)
    wsum = float(wts.sum())
    if wsum == 0.0:
        return cov, wts
    return cov, wts / wsum


def save_model(model: PUModel, path) -> None:
    """Write a fitted model as plain text; see the README for the layout."""
    lines = [
        "pucell-model 1",
        f"kernel {model.kernel.family} {float(model.kernel.shape)!r}",
        f"radius {float(model.radius)!r}",
        f"policy {model.policy}",
        f"search {model.search}",
        f"nodes {len(model.nodes)}",
    ]
    for (x, y), f in zip(model.nodes, model.values):
        lines.append(f"{float(x)!r} {float(y)!r} {float(f)!r}")
    lines.append(f"centers {len(model.centers)}")
    for x, y in model.centers:
        lines.append(f"{float(x)!r} {float(y)!r}")
    for j, loc in enumerate(model.locals):
        if loc is None:
            continue
        lines.append(f"local {j} {len(loc.node_indices)}")
        lines.append(" ".join(str(int(i)) for i in loc.node_indices))
        lines.append(" ".join(repr(float(c)) for c in loc.coeffs))
    lines.append("end")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def load_model(path) -> PUModel:
    """Read a model written by save_model and rebuild its search index."""
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.strip() for ln in fh]
    pos = 0

    def take(prefix: str) -> list[str]:
        nonlocal pos
        if pos >= len(lines) or not lines[pos].startswith(prefix):
            raise ValueError(f"{path}: expected '{prefix} ...' at line {pos + 1}")
        parts = lines[pos].split()
        pos += 1
        return parts

    header = take("pucell-model")
    if header[1:] != ["1"]:
        raise ValueError(f"{path}: unsupported model version {header[1:]}")
    _, family, shape = take("kernel")
    kernel = KernelSpec(family, float(shape))
    radius = float(take("radius")[1])
    policy = take("policy")[1]
    search = take("search")[1]
    n = int(take("nodes")[1])
    rows = [lines[pos + i].split() for i in range(n)]
    pos += n
    nodes = np.array([[float(r[0]), float(r[1])] for r in rows])
    values = np.array([float(r[2]) for r in rows])
    d = int(take("centers")[1])
    rows = [lines[pos + i].split() for i in range(d)]
    pos += d
    centers = np.array([[float(r[0]), float(r[1])] for r in rows])
    fitted_locals: list[LocalInterpolant | None] = [None] * d
    while pos < len(lines) and lines[pos].startswith("local"):
        _, j, m = take("local")
        j, m = int(j), int(m)
        idx = np.array([int(t) for t in lines[pos].split()], dtype=np.int64)
        coeffs = np.array([float(t) for t in lines[pos + 1].split()])
        pos += 2
        if len(idx) != m or len(coeffs) != m:
            raise ValueError(f"{path}: local {j} expects {m} entries")
        fitted_locals[j] = LocalInterpolant(centers[j], radius, idx, coeffs)
    take("end")
    fitted = np.array([loc is not None for loc in fitted_locals], dtype=bool)
    center_grid = build_cell_grid(centers, radius) if search == SEARCH_CELL else None
    return PUModel(
        kernel=kernel,
        nodes=nodes,
        values=values,
        centers=centers,
        radius=radius,
        locals=fitted_locals,
        fitted=fitted,
        policy=policy,
        search=search,
        center_grid=center_grid,
    )
