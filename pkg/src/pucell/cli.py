"""Command-line front end: dataset generation, fit/eval, and experiment drivers.

Exit codes: 0 on success, 2 for usage errors, 3 for unreadable or malformed
data files, 4 for numerical failures (singular local systems, uncovered
evaluation points under the strict policy).
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass

import numpy as np

from . import bench
from .datasets import DatasetSpec, franke, grid_centers, halton
from .kernels import GAUSSIAN, WENDLAND_C2, KernelSpec
from .pu import (
    POLICY_ERROR,
    POLICY_NEAREST,
    FitError,
    UncoveredPointError,
    build_pu_model,
    evaluate,
    load_model,
    save_model,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4

_KERNEL_CHOICES = {"gaussian": GAUSSIAN, "wendland": WENDLAND_C2}
_DEFAULT_SHAPE = {GAUSSIAN: 50.0, WENDLAND_C2: 1.0}
_DEFAULT_SWEEP = {GAUSSIAN: (1.0, 100.0), WENDLAND_C2: (0.1, 2.0)}


class DataFileError(Exception):
    """A data file could not be read or parsed."""


@dataclass
class RunConfig:
    """Everything one CLI invocation needs, normalized from the flags."""

    command: str
    n: int = 4225
    d: int = 1024
    side: int = 33
    kernel: KernelSpec = KernelSpec(WENDLAND_C2, 1.0)
    policy: str | None = POLICY_NEAREST
    repeats: int = 3
    workers: int | None = None
    with_franke: bool = False
    nodes_path: str | None = None
    centers_path: str | None = None
    model_path: str | None = None
    points_path: str | None = None
    out_path: str | None = None
    sweep_min: float | None = None
    sweep_max: float | None = None
    sweep_count: int = 20


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pucell",
        description="Partition-of-unity RBF interpolation of scattered data "
        "on the unit square, with a cell-based range search.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_sizes(p, n=True, d=True, side=True):
        if n:
            p.add_argument("--n", type=int, default=4225, help="number of nodes")
        if d:
            p.add_argument("--d", type=int, default=1024,
                           help="number of subdomains (perfect square)")
        if side:
            p.add_argument("--side", type=int, default=33,
                           help="evaluation grid is side x side")

    def add_kernel(p):
        p.add_argument("--kernel", choices=sorted(_KERNEL_CHOICES),
                       default="wendland", help="kernel family")
        p.add_argument("--shape", type=float, default=None,
                       help="shape parameter (default 1 for wendland, "
                       "50 for gaussian)")

    def add_policy(p):
        p.add_argument("--policy", choices=[POLICY_ERROR, POLICY_NEAREST],
                       default=POLICY_NEAREST,
                       help="what to do at evaluation points no subdomain covers")

    def add_parallel(p):
        p.add_argument("--parallel", action="store_true",
                       help="fit local systems on a thread pool")

    p = sub.add_parser("gen", help="write Halton nodes as CSV")
    add_sizes(p, d=False, side=False)
    p.add_argument("--franke", action="store_true",
                   help="append Franke values as a third column")
    p.add_argument("--out", help="output CSV (default stdout)")

    p = sub.add_parser("fit", help="fit a model from a nodes CSV")
    p.add_argument("--nodes", required=True, help="CSV with x,y or x,y,f rows")
    p.add_argument("--franke", action="store_true",
                   help="use Franke values when the file has no third column")
    p.add_argument("--centers", help="CSV of centers (default: uniform grid)")
    add_sizes(p, n=False, side=False)
    add_kernel(p)
    add_policy(p)
    add_parallel(p)
    p.add_argument("--out", required=True, help="path for the fitted model")

    p = sub.add_parser("eval", help="evaluate a fitted model at points")
    p.add_argument("--model", required=True, help="model written by fit")
    p.add_argument("--points", required=True, help="CSV of x,y evaluation points")
    p.add_argument("--policy", choices=[POLICY_ERROR, POLICY_NEAREST],
                   default=None, help="override the policy stored in the model")
    p.add_argument("--out", help="output CSV of x,y,value (default stdout)")

    p = sub.add_parser("accuracy", help="fit Halton/Franke data, report grid RMSE")
    add_sizes(p)
    add_kernel(p)
    add_policy(p)
    add_parallel(p)
    p.add_argument("--out", help="also write the report row as CSV")

    p = sub.add_parser("sweep", help="sweep the shape parameter, report RMSE curve")
    add_sizes(p)
    add_kernel(p)
    add_policy(p)
    add_parallel(p)
    p.add_argument("--sweep-min", type=float, default=None,
                   help="smallest shape value (default: family range)")
    p.add_argument("--sweep-max", type=float, default=None,
                   help="largest shape value (default: family range)")
    p.add_argument("--sweep-count", type=int, default=20,
                   help="number of equispaced shape values")
    p.add_argument("--out", help="write the curve as CSV (shape,rmse,failed)")

    p = sub.add_parser("timing", help="time cell search against a linear scan")
    add_sizes(p)
    add_kernel(p)
    add_policy(p)
    add_parallel(p)
    p.add_argument("--repeats", type=int, default=3,
                   help="repetitions per method, best time wins")
    p.add_argument("--out", help="also write the report row as CSV")

    return parser


def parse_args(argv=None) -> RunConfig:
    """Parse flags into a RunConfig; exits with code 2 on usage errors."""
    parser = _build_parser()
    ns = parser.parse_args(argv)

    config = RunConfig(command=ns.command)
    if hasattr(ns, "n"):
        if ns.n < 1:
            parser.error(f"--n must be positive, got {ns.n}")
        config.n = ns.n
    if hasattr(ns, "d"):
        if ns.d < 1:
            parser.error(f"--d must be positive, got {ns.d}")
        config.d = ns.d
    if hasattr(ns, "side"):
        if ns.side < 2:
            parser.error(f"--side must be at least 2, got {ns.side}")
        config.side = ns.side
    if hasattr(ns, "kernel"):
        family = _KERNEL_CHOICES[ns.kernel]
        shape = ns.shape if ns.shape is not None else _DEFAULT_SHAPE[family]
        if shape <= 0:
            parser.error(f"--shape must be positive, got {shape}")
        config.kernel = KernelSpec(family, float(shape))
    if ns.command == "eval":
        config.policy = ns.policy  # None keeps the policy stored in the model
    elif getattr(ns, "policy", None) is not None:
        config.policy = ns.policy
    if hasattr(ns, "repeats"):
        if ns.repeats < 1:
            parser.error(f"--repeats must be positive, got {ns.repeats}")
        config.repeats = ns.repeats
    if getattr(ns, "parallel", False):
        import os

        config.workers = os.cpu_count() or 1
    config.with_franke = getattr(ns, "franke", False)
    config.nodes_path = getattr(ns, "nodes", None)
    config.centers_path = getattr(ns, "centers", None)
    config.model_path = getattr(ns, "model", None)
    config.points_path = getattr(ns, "points", None)
    config.out_path = getattr(ns, "out", None)
    if ns.command == "sweep":
        lo, hi = _DEFAULT_SWEEP[config.kernel.family]
        config.sweep_min = ns.sweep_min if ns.sweep_min is not None else lo
        config.sweep_max = ns.sweep_max if ns.sweep_max is not None else hi
        config.sweep_count = ns.sweep_count
        if config.sweep_count < 2:
            parser.error(f"--sweep-count must be at least 2, got {ns.sweep_count}")
        if not config.sweep_min < config.sweep_max:
            parser.error("--sweep-min must be smaller than --sweep-max")
        if config.sweep_min <= 0:
            parser.error(f"--sweep-min must be positive, got {config.sweep_min}")
    return config


def read_points_csv(path, allow_values=True):
    """Read x,y[,f] rows; returns (points, values or None).

    Decimal separator is '.', no header row.  Malformed rows and
    out-of-domain coordinates raise DataFileError naming the line.
    """
    rows = []
    ncols = None
    try:
        fh = open(path, "r", newline="", encoding="utf-8")
    except OSError as exc:
        raise DataFileError(f"cannot open {path}: {exc}") from exc
    with fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row:
                continue
            if len(row) not in (2, 3) or (len(row) == 3 and not allow_values):
                raise DataFileError(
                    f"{path}:{lineno}: expected {'2 or 3' if allow_values else '2'}"
                    f" columns, got {len(row)}"
                )
            if ncols is None:
                ncols = len(row)
            elif len(row) != ncols:
                raise DataFileError(
                    f"{path}:{lineno}: inconsistent column count "
                    f"({len(row)} after {ncols})"
                )
            try:
                vals = [float(tok) for tok in row]
            except ValueError as exc:
                raise DataFileError(f"{path}:{lineno}: {exc}") from exc
            x, y = vals[0], vals[1]
            if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
                raise DataFileError(
                    f"{path}:{lineno}: point ({x}, {y}) lies outside the unit square"
                )
            rows.append(vals)
    if not rows:
        raise DataFileError(f"{path}: no data rows")
    data = np.array(rows, dtype=np.float64)
    if data.shape[1] == 3:
        return data[:, :2], data[:, 2]
    return data, None


def _write_rows(out_path, rows):
    if out_path is None:
        csv.writer(sys.stdout, lineterminator="\n").writerows(rows)
        return
    try:
        with open(out_path, "w", newline="", encoding="ascii") as fh:
            csv.writer(fh, lineterminator="\n").writerows(rows)
    except OSError as exc:
        raise DataFileError(f"cannot write {out_path}: {exc}") from exc


def _format_points(pts, values=None):
    if values is None:
        return [[repr(float(x)), repr(float(y))] for x, y in pts]
    return [
        [repr(float(x)), repr(float(y)), repr(float(f))]
        for (x, y), f in zip(pts, values)
    ]


def _cmd_gen(config: RunConfig) -> int:
    pts = halton(config.n)
    values = franke(pts[:, 0], pts[:, 1]) if config.with_franke else None
    _write_rows(config.out_path, _format_points(pts, values))
    return EXIT_OK


def _load_fit_inputs(config: RunConfig):
    pts, values = read_points_csv(config.nodes_path)
    if values is None:
        if not config.with_franke:
            raise DataFileError(
                f"{config.nodes_path}: no value column; pass --franke to "
                "interpolate the Franke surface"
            )
        values = franke(pts[:, 0], pts[:, 1])
    if config.centers_path is not None:
        centers, _ = read_points_csv(config.centers_path, allow_values=False)
    else:
        try:
            centers = grid_centers(config.d)
        except ValueError as exc:
            raise DataFileError(str(exc)) from exc
    return pts, values, centers


def _cmd_fit(config: RunConfig) -> int:
    pts, values, centers = _load_fit_inputs(config)
    try:
        model = build_pu_model(
            pts, values, centers, config.kernel,
            policy=config.policy, workers=config.workers,
        )
    except ValueError as exc:
        raise DataFileError(str(exc)) from exc
    save_model(model, config.out_path)
    fitted = int(np.count_nonzero(model.fitted))
    print(
        f"fitted {fitted}/{len(model.centers)} subdomains on {len(pts)} nodes, "
        f"kernel {model.kernel.family} shape {model.kernel.shape:g}, "
        f"model written to {config.out_path}"
    )
    return EXIT_OK


def _cmd_eval(config: RunConfig) -> int:
    try:
        model = load_model(config.model_path)
    except OSError as exc:
        raise DataFileError(f"cannot open {config.model_path}: {exc}") from exc
    except (ValueError, IndexError) as exc:
        raise DataFileError(f"{config.model_path}: {exc}") from exc
    if config.policy is not None and config.policy != model.policy:
        model = _with_policy(model, config.policy)
    pts, _ = read_points_csv(config.points_path, allow_values=False)
    report = evaluate(model, pts)
    _write_rows(config.out_path, _format_points(pts, report.values))
    return EXIT_OK


def _with_policy(model, policy):
    from dataclasses import replace

    return replace(model, policy=policy)


def _print_report(r: bench.BenchReport) -> None:
    print(
        f"n={r.n} d={r.d} s={r.s} kernel={r.kernel.family} "
        f"shape={r.kernel.shape:g}"
    )
    print(f"rmse {r.rmse:.6e}")
    print(f"fit {r.fit_time:.3f} s, eval {r.eval_time:.3f} s")
    if r.search_time_brute > 0.0:
        ratio = r.search_time_brute / r.search_time_cell
        print(
            f"localization: cell {r.search_time_cell:.4f} s, "
            f"brute {r.search_time_brute:.4f} s, speedup {ratio:.2f}x"
        )
    print(
        f"subdomains: mean size {r.mean_subdomain_size:.2f}, "
        f"max overlap {r.max_overlap}, uncovered points {r.uncovered_count}"
    )


def _cmd_accuracy(config: RunConfig) -> int:
    spec = DatasetSpec(config.n, config.d, config.side)
    report = bench.run_accuracy_experiment(
        spec, config.kernel, policy=config.policy, workers=config.workers
    )
    _print_report(report)
    if config.out_path is not None:
        bench.write_reports_csv(config.out_path, [report])
    return EXIT_OK


def _cmd_sweep(config: RunConfig) -> int:
    spec = DatasetSpec(config.n, config.d, config.side)
    shapes = bench.equispaced(config.sweep_min, config.sweep_max, config.sweep_count)
    points = bench.run_shape_sweep(
        spec, config.kernel.family, shapes,
        policy=config.policy, workers=config.workers,
    )
    for p in points:
        status = "failed" if p.failed else f"{p.rmse:.6e}"
        print(f"shape {p.shape:<10.6g} rmse {status}")
    if config.out_path is not None:
        bench.write_sweep_csv(config.out_path, points)
    return EXIT_OK


def _cmd_timing(config: RunConfig) -> int:
    spec = DatasetSpec(config.n, config.d, config.side)
    report = bench.run_timing_experiment(
        spec, config.kernel, repeats=config.repeats,
        policy=config.policy, workers=config.workers,
    )
    _print_report(report)
    if config.out_path is not None:
        bench.write_reports_csv(config.out_path, [report])
    return EXIT_OK


_COMMANDS = {
    "gen": _cmd_gen,
    "fit": _cmd_fit,
    "eval": _cmd_eval,
    "accuracy": _cmd_accuracy,
    "sweep": _cmd_sweep,
    "timing": _cmd_timing,
}


def run(config: RunConfig) -> int:
    """Execute a parsed configuration, mapping failures to exit codes."""
    try:
        return _COMMANDS[config.command](config)
    except DataFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (FitError, UncoveredPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def main(argv=None) -> int:
    return run(parse_args(argv))


def console_main() -> None:
    sys.exit(main())
