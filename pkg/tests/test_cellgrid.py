"""Cell grid construction and fixed-radius range queries."""

import math

import numpy as np
import pytest

from pucell.cellgrid import (
    brute_force_range_query,
    build_cell_grid,
    cell_index,
    cell_window,
    cells_examined,
    range_query,
    strip_count,
    subdomain_radius,
)
from pucell.datasets import halton


class TestSubdomainRadius:
    def test_two_subdomains_give_unit_radius(self):
        assert subdomain_radius(2) == 1.0

    def test_standard_sizes(self):
        assert subdomain_radius(1024) == pytest.approx(
            math.sqrt(2.0 / 1024.0), rel=1e-15
        )
        assert subdomain_radius(16384) == pytest.approx(
            math.sqrt(2.0 / 16384.0), rel=1e-15
        )

    def test_rejects_nonpositive(self):
        for bad in (0, -3):
            with pytest.raises(ValueError):
                subdomain_radius(bad)


class TestStripCount:
    def test_half_gives_two(self):
        assert strip_count(0.5) == 2

    def test_standard_sizes(self):
        assert strip_count(subdomain_radius(1024)) == 23
        assert strip_count(subdomain_radius(16384)) == 91

    def test_width_above_one_gives_single_strip(self):
        """A single subdomain has radius sqrt(2) > 1 and one strip."""
        assert strip_count(subdomain_radius(1)) == 1

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            strip_count(0.0)


class TestCellIndex:
    def test_origin_is_first_cell(self):
        assert cell_index((0.0, 0.0), 23, subdomain_radius(1024)) == (1, 1)

    def test_far_corner_clamps_into_last_cell(self):
        assert cell_index((1.0, 1.0), 23, subdomain_radius(1024)) == (23, 23)

    def test_midpoint(self):
        delta = subdomain_radius(1024)  # 0.0441942, so 0.5/delta = 11.3
        assert cell_index((0.5, 0.5), 23, delta) == (12, 12)

    def test_exact_boundary_clamp(self):
        assert cell_index((1.0, 0.25), 2, 0.5) == (2, 1)

    def test_outside_domain_rejected(self):
        with pytest.raises(ValueError, match="outside"):
            cell_index((1.5, 0.5), 23, subdomain_radius(1024))


class TestBuildCellGrid:
    def test_empty_input(self):
        grid = build_cell_grid(np.zeros((0, 2)), 0.5)
        assert grid.n == 0
        assert np.array_equal(grid.cell_start, np.zeros(5, dtype=np.int64))
        assert len(range_query(grid, (0.5, 0.5), 0.4)) == 0

    def test_four_symmetric_points(self):
        pts = np.array([[0.25, 0.25], [0.75, 0.25], [0.25, 0.75], [0.75, 0.75]])
        grid = build_cell_grid(pts, 0.5)
        assert grid.q == 2
        assert np.array_equal(grid.cell_start, [0, 1, 2, 3, 4])

    def test_counts_conserved(self):
        pts = halton(4225)
        grid = build_cell_grid(pts, subdomain_radius(1024))
        counts = np.diff(grid.cell_start)
        assert counts.sum() == 4225
        assert len(counts) == grid.q * grid.q

    def test_every_point_stored_in_its_own_cell(self):
        """The offset-table range of each cell holds exactly its points."""
        pts = halton(500)
        delta = subdomain_radius(256)
        grid = build_cell_grid(pts, delta)
        for w in range(1, grid.q + 1):
            for v in range(1, grid.q + 1):
                k = (w - 1) * grid.q + (v - 1)
                block = grid.sorted_points[grid.cell_start[k] : grid.cell_start[k + 1]]
                for p in block:
                    assert cell_index(p, grid.q, delta) == (v, w)

    def test_perm_is_permutation_recovering_input(self):
        rng = np.random.default_rng(2)
        pts = rng.uniform(size=(300, 2))
        grid = build_cell_grid(pts, 0.1)
        assert np.array_equal(np.sort(grid.perm), np.arange(300))
        assert np.array_equal(grid.sorted_points, pts[grid.perm])

    def test_build_is_deterministic(self):
        rng = np.random.default_rng(4)
        pts = rng.uniform(size=(400, 2))
        a = build_cell_grid(pts, 0.07)
        b = build_cell_grid(pts, 0.07)
        assert np.array_equal(a.perm, b.perm)
        assert np.array_equal(a.cell_start, b.cell_start)

    def test_duplicate_points_allowed(self):
        """The grid itself has no distinctness requirement."""
        pts = np.array([[0.5, 0.5]] * 3)
        grid = build_cell_grid(pts, 0.25)
        assert np.array_equal(range_query(grid, (0.5, 0.5), 0.1), [0, 1, 2])

    def test_out_of_domain_point_named(self):
        pts = np.array([[0.1, 0.1], [0.2, 1.0001]])
        with pytest.raises(ValueError, match="point 1"):
            build_cell_grid(pts, 0.5)

    def test_nonpositive_width_rejected(self):
        with pytest.raises(ValueError):
            build_cell_grid(np.array([[0.5, 0.5]]), 0.0)


class TestRangeQuery:
    def test_zero_radius_hits_exact_point(self):
        pts = halton(50)
        grid = build_cell_grid(pts, 0.25)
        assert np.array_equal(range_query(grid, pts[3], 0.0), [3])

    def test_boundary_distance_included(self):
        """Dyadic coordinates make the boundary distance exact."""
        pts = np.array([[0.75, 0.5], [0.5, 0.75], [0.8125, 0.5], [0.25, 0.5]])
        grid = build_cell_grid(pts, 0.25)
        hits = range_query(grid, (0.5, 0.5), 0.25)
        assert np.array_equal(hits, [0, 1, 3])

    def test_results_ascending(self):
        rng = np.random.default_rng(9)
        pts = rng.uniform(size=(800, 2))
        grid = build_cell_grid(pts, 0.1)
        for _ in range(20):
            hits = range_query(grid, rng.uniform(size=2), 0.1)
            assert np.all(np.diff(hits) > 0)

    def test_matches_linear_scan_on_random_instances(self):
        """Seeded sweep over sizes that hit both query code paths."""
        rng = np.random.default_rng(31)
        for _ in range(25):
            n = int(rng.integers(1, 3000))
            pts = rng.uniform(size=(n, 2))
            radius = subdomain_radius(int(rng.integers(1, 2500)))
            grid = build_cell_grid(pts, radius)
            for _ in range(40):
                c = rng.uniform(size=2)
                got = range_query(grid, c, radius)
                want = brute_force_range_query(pts, c, radius)
                assert np.array_equal(got, want)

    def test_radius_larger_than_cell_width(self):
        """Queries stay exact when the radius spans several cells."""
        rng = np.random.default_rng(41)
        pts = rng.uniform(size=(1500, 2))
        grid = build_cell_grid(pts, 0.05)
        for radius in (0.08, 0.17, 0.4):
            for _ in range(15):
                c = rng.uniform(size=2)
                assert np.array_equal(
                    range_query(grid, c, radius),
                    brute_force_range_query(pts, c, radius),
                )

    def test_window_is_at_most_nine_cells_at_cell_radius(self):
        rng = np.random.default_rng(12)
        pts = rng.uniform(size=(1000, 2))
        radius = subdomain_radius(512)
        grid = build_cell_grid(pts, radius)
        for _ in range(500):
            assert cells_examined(grid, rng.uniform(size=2), radius) <= 9

    def test_window_clamps_at_corner(self):
        radius = subdomain_radius(512)
        grid = build_cell_grid(halton(100), radius)
        assert cell_window(grid, (0.0, 0.0), radius) == (1, 2, 1, 2)
        assert cells_examined(grid, (0.0, 0.0), radius) == 4

    def test_negative_radius_rejected(self):
        grid = build_cell_grid(halton(10), 0.25)
        with pytest.raises(ValueError):
            range_query(grid, (0.5, 0.5), -0.1)


class TestBruteForceRangeQuery:
    def test_line_of_points(self):
        pts = [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [3.0, 0.0]]
        hits = brute_force_range_query(pts, (0.0, 0.0), 1.5)
        assert np.array_equal(hits, [0, 1])

    def test_empty_input(self):
        assert len(brute_force_range_query(np.zeros((0, 2)), (0.5, 0.5), 1.0)) == 0

    def test_zero_radius(self):
        pts = halton(20)
        assert np.array_equal(brute_force_range_query(pts, pts[7], 0.0), [7])
