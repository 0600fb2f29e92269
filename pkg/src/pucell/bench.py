"""Error metrics, accuracy and shape-sweep drivers, and the search timing harness."""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass

import numpy as np

from .cellgrid import (
    brute_force_range_query,
    build_cell_grid,
    range_query,
    subdomain_radius,
)
from .datasets import DatasetSpec, franke, grid_centers, grid_points, halton
from .kernels import KernelSpec
from .pu import (
    SEARCH_BRUTE,
    SEARCH_CELL,
    FitError,
    build_pu_model,
    evaluate,
)


def rmse(exact, approx) -> float:
    """Root mean square error between two equally long value arrays."""
    a = np.asarray(exact, dtype=np.float64)
    b = np.asarray(approx, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    if a.size == 0:
        raise ValueError("rmse of empty arrays is undefined")
    err = a - b
    return float(np.sqrt(np.mean(err * err)))


@dataclass(frozen=True)
class BenchReport:
    """One experiment row: sizes, kernel, error, and phase timings in seconds."""

    n: int
    d: int
    s: int
    kernel: KernelSpec
    rmse: float
    fit_time: float
    eval_time: float
    search_time_cell: float
    search_time_brute: float
    uncovered_count: int
    max_overlap: int
    mean_subdomain_size: float


@dataclass(frozen=True)
class SweepPoint:
    """One shape-parameter sample of a sweep; rmse is NaN when failed."""

    shape: float
    rmse: float
    failed: bool


def _experiment_data(spec: DatasetSpec):
    nodes = halton(spec.n)
    values = franke(nodes[:, 0], nodes[:, 1])
    centers = grid_centers(spec.d)
    eval_pts = grid_points(spec.s_side)
    exact = franke(eval_pts[:, 0], eval_pts[:, 1])
    return nodes, values, centers, eval_pts, exact


def _mean_subdomain_size(model) -> float:
    sizes = [len(loc.node_indices) for loc in model.locals if loc is not None]
    return float(np.mean(sizes)) if sizes else 0.0


def run_accuracy_experiment(
    spec: DatasetSpec,
    kernel: KernelSpec,
    policy: str = "nearest",
    search: str = SEARCH_CELL,
    workers: int | None = None,
) -> BenchReport:
    """Fit Halton/Franke data at the given sizes and report the grid RMSE."""
    nodes, values, centers, eval_pts, exact = _experiment_data(spec)
    t0 = time.perf_counter()
    model = build_pu_model(
        nodes, values, centers, kernel, policy=policy, search=search, workers=workers
    )
    t1 = time.perf_counter()
    report = evaluate(model, eval_pts)
    t2 = time.perf_counter()
    return BenchReport(
        n=spec.n,
        d=spec.d,
        s=len(eval_pts),
        kernel=kernel,
        rmse=rmse(exact, report.values),
        fit_time=t1 - t0,
        eval_time=t2 - t1,
        search_time_cell=0.0,
        search_time_brute=0.0,
        uncovered_count=report.uncovered_count,
        max_overlap=report.max_overlap,
        mean_subdomain_size=_mean_subdomain_size(model),
    )


def run_shape_sweep(
    spec: DatasetSpec,
    family: str,
    shapes,
    policy: str = "nearest",
    workers: int | None = None,
) -> list[SweepPoint]:
    """RMSE as a function of the shape parameter on one fixed dataset.

    Shape values whose fit raises a numerical error, or whose error comes
    out non-finite, are recorded as failed points with an NaN sentinel.
    """
    nodes, values, centers, eval_pts, exact = _experiment_data(spec)
    points = []
    for shape in shapes:
        kernel = KernelSpec(family, float(shape))
        try:
            model = build_pu_model(
                nodes, values, centers, kernel, policy=policy, workers=workers
            )
            err = rmse(exact, evaluate(model, eval_pts).values)
        except FitError:
            err = math.nan
        failed = not math.isfinite(err)
        points.append(SweepPoint(shape=float(shape), rmse=err, failed=failed))
    return points


def equispaced(lo: float, hi: float, count: int) -> np.ndarray:
    """count equally spaced values from lo to hi inclusive."""
    if count < 2:
        raise ValueError(f"need at least 2 sweep values, got {count}")
    if not lo < hi:
        raise ValueError(f"sweep range must satisfy lo < hi, got [{lo}, {hi}]")
    return np.linspace(lo, hi, count)


def run_timing_experiment(
    spec: DatasetSpec,
    kernel: KernelSpec,
    repeats: int = 3,
    policy: str = "nearest",
    workers: int | None = None,
) -> BenchReport:
    """Time the localization phase with the cell grid against a linear scan.

    Both methods answer the identical query set: every center against the
    node set and every evaluation grid point against the center set, all
    at the subdomain radius.  Cell timings include building the two grids.
    Reported times are best-of-repeats; the queries, and therefore the
    fitted model and its errors, must agree between the two methods.
    """
    if repeats < 1:
        raise ValueError(f"repeats must be positive, got {repeats}")
    nodes, values, centers, eval_pts, exact = _experiment_data(spec)
    radius = subdomain_radius(spec.d)

    cell_time = math.inf
    cell_answers = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        node_grid = build_cell_grid(nodes, radius)
        center_grid = build_cell_grid(centers, radius)
        answers = [range_query(node_grid, c, radius) for c in centers]
        answers += [range_query(center_grid, p, radius) for p in eval_pts]
        cell_time = min(cell_time, time.perf_counter() - t0)
        cell_answers = answers

    brute_time = math.inf
    brute_answers = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        answers = [brute_force_range_query(nodes, c, radius) for c in centers]
        answers += [brute_force_range_query(centers, p, radius) for p in eval_pts]
        brute_time = min(brute_time, time.perf_counter() - t0)
        brute_answers = answers

    for a, b in zip(cell_answers, brute_answers):
        if not np.array_equal(a, b):
            raise RuntimeError("cell and brute-force searches disagree")

    t0 = time.perf_counter()
    model = build_pu_model(
        nodes, values, centers, kernel, policy=policy, search=SEARCH_CELL,
        workers=workers,
    )
    t1 = time.perf_counter()
    report = evaluate(model, eval_pts)
    t2 = time.perf_counter()

    brute_model = build_pu_model(
        nodes, values, centers, kernel, policy=policy, search=SEARCH_BRUTE,
        workers=workers,
    )
    for loc, bloc in zip(model.locals, brute_model.locals):
        if (loc is None) != (bloc is None):
            raise RuntimeError("search methods disagree on an empty subdomain")
        if loc is not None and not (
            np.array_equal(loc.node_indices, bloc.node_indices)
            and np.array_equal(loc.coeffs, bloc.coeffs)
        ):
            raise RuntimeError("search methods produced different local fits")
    brute_report = evaluate(brute_model, eval_pts)
    if not np.array_equal(report.values, brute_report.values):
        raise RuntimeError("search methods produced different evaluations")

    return BenchReport(
        n=spec.n,
        d=spec.d,
        s=len(eval_pts),
        kernel=kernel,
        rmse=rmse(exact, report.values),
        fit_time=t1 - t0,
        eval_time=t2 - t1,
        search_time_cell=cell_time,
        search_time_brute=brute_time,
        uncovered_count=report.uncovered_count,
        max_overlap=report.max_overlap,
        mean_subdomain_size=_mean_subdomain_size(model),
    )


_REPORT_FIELDS = [
    "n",
    "d",
    "s",
    "kernel",
    "shape",
    "rmse",
    "fit_time",
    "eval_time",
    "search_time_cell",
    "search_time_brute",
    "uncovered_count",
    "max_overlap",
    "mean_subdomain_size",
]


def write_reports_csv(path, reports) -> None:
    """Write experiment rows as CSV with a header, one row per report."""
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_REPORT_FIELDS)
        for r in reports:
            writer.writerow(
                [
                    r.n,
                    r.d,
                    r.s,
                    r.kernel.family,
                    f"{r.kernel.shape:.17g}",
                    f"{r.rmse:.17g}",
                    f"{r.fit_time:.6g}",
                    f"{r.eval_time:.6g}",
                    f"{r.search_time_cell:.6g}",
                    f"{r.search_time_brute:.6g}",
                    r.uncovered_count,
                    r.max_overlap,
                    f"{r.mean_subdomain_size:.6g}",
                ]
            )


def write_sweep_csv(path, points) -> None:
    """Write sweep samples as CSV: shape, rmse, failed flag."""
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["shape", "rmse", "failed"])
        for p in points:
            writer.writerow([f"{p.shape:.17g}", f"{p.rmse:.17g}", int(p.failed)])
