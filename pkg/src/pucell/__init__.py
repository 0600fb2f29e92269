"""Partition-of-unity RBF interpolation of scattered 2D data.

Local radial basis function interpolants on overlapping disk subdomains
are blended into a global surface, with node and center lookups served
by a cell-partitioned fixed-radius search over the unit square.
"""

from .bench import (
    BenchReport,
    SweepPoint,
    equispaced,
    rmse,
    run_accuracy_experiment,
    run_shape_sweep,
    run_timing_experiment,
    write_reports_csv,
    write_sweep_csv,
)
from .cellgrid import (
    CellGrid,
    brute_force_range_query,
    build_cell_grid,
    cell_index,
    cell_window,
    cells_examined,
    range_query,
    strip_count,
    subdomain_radius,
)
from .datasets import DatasetSpec, franke, grid_centers, grid_points, halton
from .kernels import GAUSSIAN, WENDLAND_C2, KernelSpec, kernel_matrix, kernel_value
from .pu import (
    EmptySubdomainError,
    EvalReport,
    FitError,
    IllConditionedError,
    LocalInterpolant,
    PUModel,
    UncoveredPointError,
    build_pu_model,
    coverage_weights,
    eval_local,
    eval_pu,
    evaluate,
    fit_local,
    load_model,
    save_model,
    weight,
)

__version__ = "0.1.0"

__all__ = [
    "BenchReport",
    "CellGrid",
    "DatasetSpec",
    "EmptySubdomainError",
    "EvalReport",
    "FitError",
    "GAUSSIAN",
    "IllConditionedError",
    "KernelSpec",
    "LocalInterpolant",
    "PUModel",
    "SweepPoint",
    "UncoveredPointError",
    "WENDLAND_C2",
    "brute_force_range_query",
    "build_cell_grid",
    "build_pu_model",
    "cell_index",
    "cell_window",
    "cells_examined",
    "coverage_weights",
    "equispaced",
    "eval_local",
    "eval_pu",
    "evaluate",
    "fit_local",
    "franke",
    "grid_centers",
    "grid_points",
    "halton",
    "kernel_matrix",
    "kernel_value",
    "load_model",
    "range_query",
    "rmse",
    "run_accuracy_experiment",
    "run_shape_sweep",
    "run_timing_experiment",
    "save_model",
    "strip_count",
    "subdomain_radius",
    "weight",
    "write_reports_csv",
    "write_sweep_csv",
]
