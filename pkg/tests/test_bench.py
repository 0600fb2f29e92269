"""Error metric, experiment drivers, and report emission."""

import csv
import math

import numpy as np
import pytest

import pucell.bench as bench
from pucell.bench import (
    BenchReport,
    equispaced,
    rmse,
    run_accuracy_experiment,
    run_shape_sweep,
    run_timing_experiment,
    write_reports_csv,
    write_sweep_csv,
)
from pucell.datasets import DatasetSpec
from pucell.kernels import GAUSSIAN, WENDLAND_C2, KernelSpec
from pucell.pu import FitError

WEND1 = KernelSpec(WENDLAND_C2, 1.0)


class TestRmse:
    def test_zero_for_identical_arrays(self):
        assert rmse([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 0.0

    def test_constant_offset(self):
        assert rmse(np.zeros(5), np.full(5, 0.1)) == pytest.approx(0.1, rel=1e-15)

    def test_mixed_errors(self):
        """sqrt((3^2 + 4^2) / 2) = sqrt(12.5)."""
        assert rmse([0.0, 0.0], [3.0, 4.0]) == pytest.approx(
            math.sqrt(12.5), rel=1e-15
        )

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError, match="mismatch"):
            rmse([1.0], [1.0, 2.0])

    def test_empty_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            rmse([], [])


class TestAccuracyExperiment:
    def test_small_run_is_sane(self):
        report = run_accuracy_experiment(DatasetSpec(1089, 256, s_side=17), WEND1)
        assert report.n == 1089 and report.d == 256 and report.s == 289
        assert 0.0 < report.rmse < 1e-2
        assert report.uncovered_count == 0
        assert report.max_overlap >= 1
        assert report.mean_subdomain_size > 1.0
        assert report.fit_time > 0.0 and report.eval_time > 0.0

    def test_error_shrinks_with_more_nodes(self):
        coarse = run_accuracy_experiment(DatasetSpec(289, 64, s_side=17), WEND1)
        fine = run_accuracy_experiment(DatasetSpec(1089, 256, s_side=17), WEND1)
        assert fine.rmse < coarse.rmse


class TestShapeSweep:
    def test_sweep_shapes_and_order(self):
        shapes = [0.5, 1.0, 2.0]
        points = run_shape_sweep(DatasetSpec(289, 64, s_side=9), WENDLAND_C2, shapes)
        assert [p.shape for p in points] == shapes
        assert all(math.isfinite(p.rmse) and not p.failed for p in points)

    def test_sweep_matches_single_run(self):
        spec = DatasetSpec(289, 64, s_side=9)
        (point,) = run_shape_sweep(spec, WENDLAND_C2, [1.0])
        report = run_accuracy_experiment(spec, WEND1)
        assert point.rmse == pytest.approx(report.rmse, rel=1e-12)

    def test_failed_fit_becomes_nan_sentinel(self, monkeypatch):
        calls = {"count": 0}
        real_build = bench.build_pu_model

        def flaky_build(*args, **kwargs):
            calls["count"] += 1
            if calls["count"] == 2:
                raise FitError("synthetic failure")
            return real_build(*args, **kwargs)

        monkeypatch.setattr(bench, "build_pu_model", flaky_build)
        points = run_shape_sweep(
            DatasetSpec(289, 64, s_side=9), WENDLAND_C2, [0.5, 1.0, 2.0]
        )
        assert [p.failed for p in points] == [False, True, False]
        assert math.isnan(points[1].rmse)
        assert math.isfinite(points[0].rmse) and math.isfinite(points[2].rmse)


class TestEquispaced:
    def test_endpoints_and_count(self):
        vals = equispaced(0.1, 2.0, 20)
        assert len(vals) == 20
        assert vals[0] == 0.1 and vals[-1] == 2.0

    def test_validation(self):
        with pytest.raises(ValueError):
            equispaced(1.0, 2.0, 1)
        with pytest.raises(ValueError):
            equispaced(2.0, 1.0, 5)


class TestTimingExperiment:
    def test_small_run_reports_both_methods(self):
        report = run_timing_experiment(
            DatasetSpec(289, 64, s_side=9), WEND1, repeats=2
        )
        assert report.search_time_cell > 0.0
        assert report.search_time_brute > 0.0
        assert math.isfinite(report.rmse) and report.rmse < 1e-2

    def test_rejects_nonpositive_repeats(self):
        with pytest.raises(ValueError):
            run_timing_experiment(DatasetSpec(100, 16), WEND1, repeats=0)


class TestCsvEmission:
    def test_report_rows_round_trip(self, tmp_path):
        report = BenchReport(
            n=100, d=16, s=81, kernel=WEND1, rmse=1.25e-4,
            fit_time=0.5, eval_time=0.25, search_time_cell=0.01,
            search_time_brute=0.05, uncovered_count=0, max_overlap=3,
            mean_subdomain_size=12.5,
        )
        path = tmp_path / "report.csv"
        write_reports_csv(path, [report, report])
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0][:6] == ["n", "d", "s", "kernel", "shape", "rmse"]
        assert len(rows) == 3
        assert float(rows[1][5]) == 1.25e-4
        assert rows[1][3] == "wendland"

    def test_sweep_rows_keep_nan_and_flag(self, tmp_path):
        points = run_shape_sweep(DatasetSpec(100, 16, s_side=5), WENDLAND_C2, [1.0])
        path = tmp_path / "sweep.csv"
        from pucell.bench import SweepPoint

        write_sweep_csv(
            path, points + [SweepPoint(shape=9.0, rmse=math.nan, failed=True)]
        )
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["shape", "rmse", "failed"]
        assert float(rows[1][0]) == 1.0 and rows[1][2] == "0"
        assert math.isnan(float(rows[2][1])) and rows[2][2] == "1"
