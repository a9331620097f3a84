from fractions import Fraction

import numpy as np
from django.test import SimpleTestCase, tag

from bergman_lab.dyadic import (GRID_TAGS, DyadicIndex, TruncatedGrid, domination_run, dyadic_model_apply,
                                fractional_maximal, grid_members, interval_of, maximal_norm_ratio, model_pairing,
                                sample_points, tent_tiling_check)
from bergman_lab.exceptions import InputError
from bergman_lab.functions import ONE, BoxIndicator, PowerOfModulus
from bergman_lab.geometry import HalfPlanePoint, Interval, Rectangle
from bergman_lab.quadrature import QuadratureConfig
from bergman_lab.weights import ExponentConfig

THIRD = Fraction(1, 3)
UNIT_BOX = BoxIndicator(Interval(0.0, 1.0))


def cell_pairing(f, g, cfg, grid):
    """<Q f, g>_alpha for a box indicator g, evaluating Q f once per cell where it is constant."""
    base = g.base
    members = grid.members(Rectangle(base.left, base.right, 0.0, base.length))
    edges = {e for idx in members for e in (idx.interval().left, idx.interval().right)}
    xs = sorted({base.left, base.right} | {e for e in edges if base.left < e < base.right})
    top = min(base.length, 2.0 ** grid.j_max)
    ys = sorted({0.0, top} | {2.0 ** j for j in range(grid.j_min, grid.j_max + 1) if 2.0 ** j < top})
    total = 0.0
    for x0, x1 in zip(xs, xs[1:]):
        for y0, y1 in zip(ys, ys[1:]):
            mass = (x1 - x0) * (y1 ** (1 + cfg.alpha) - y0 ** (1 + cfg.alpha)) / (1 + cfg.alpha)
            z = HalfPlanePoint((x0 + x1) / 2, (y0 + y1) / 2)
            total += dyadic_model_apply(f, cfg, grid, z) * mass
    return total


class IndexTests(SimpleTestCase):

    def assertInterval(self, interval, left, right):
        self.assertAlmostEqual(interval.left, left, places=15)
        self.assertAlmostEqual(interval.right, right, places=15)

    def test_interval_of(self):
        self.assertInterval(interval_of(DyadicIndex(0, 3)), 3.0, 4.0)
        self.assertInterval(interval_of(DyadicIndex(1, 0, THIRD)), -2 / 3, 4 / 3)
        self.assertInterval(interval_of(DyadicIndex(-1, 0, THIRD)), -1 / 6, 1 / 3)

    def test_parent_contains_child(self):
        for beta in (Fraction(0), THIRD):
            for j in range(-3, 3):
                for m in range(-4, 4):
                    child = DyadicIndex(j, m, beta)
                    parent = child.parent()
                    self.assertEqual(parent.j, j + 1)
                    self.assertLessEqual(parent.exact_left, child.exact_left)
                    self.assertGreaterEqual(parent.exact_left + parent.exact_length,
                                            child.exact_left + child.exact_length)

    def test_unknown_tag(self):
        with self.assertRaises(InputError):
            DyadicIndex(0, 0, Fraction(1, 2))


class GridTests(SimpleTestCase):

    def test_members_of_standard_grid(self):
        grid = TruncatedGrid(Fraction(0), 0, 1, x_range=(-4.0, 4.0))
        intervals = [idx.interval() for idx in grid_members(grid, Rectangle(0.0, 2.0, 0.0, 2.0))]
        self.assertEqual(intervals, [Interval(0.0, 1.0), Interval(1.0, 1.0), Interval(0.0, 2.0)])

    def test_members_of_shifted_grid(self):
        grid = TruncatedGrid(THIRD, 0, 0, x_range=(-4.0, 4.0))
        members = grid_members(grid, Rectangle(0.0, 1.0, 0.0, 1.0))
        self.assertEqual([idx.m for idx in members], [-1, 0])

    def test_tent_of(self):
        grid = TruncatedGrid()
        self.assertEqual(grid.tent_of(HalfPlanePoint(0.3, 0.6)).interval(), Interval(0.0, 1.0))
        self.assertEqual(grid.tent_of(HalfPlanePoint(0.3, 0.4)).interval(), Interval(0.0, 0.5))

    def test_containing_is_smallest_first(self):
        members = TruncatedGrid(j_min=-4, j_max=3).containing(HalfPlanePoint(0.5, 0.3))
        self.assertEqual([idx.j for idx in members], [-1, 0, 1, 2, 3])

    def test_invalid_scales(self):
        with self.assertRaises(InputError):
            TruncatedGrid(j_min=2, j_max=1)


class TilingTests(SimpleTestCase):

    def test_tents_tile_the_region(self):
        for beta in (Fraction(0), THIRD):
            grid = TruncatedGrid(beta, -4, 2, x_range=(-4.0, 4.0))
            report = tent_tiling_check(grid, Rectangle(-4.0, 4.0, 0.0, 4.0), samples=10_000, seed=3)
            self.assertTrue(report.ok, report.violations[:5])
            self.assertEqual(report.samples, 10_000)

    def test_points_on_tent_edges(self):
        grid = TruncatedGrid(Fraction(0), -4, 2, x_range=(-4.0, 4.0))
        points = [(0.0, 0.5), (1.0, 1.0), (-0.5, 0.25), (0.999999, 0.499999)]
        report = tent_tiling_check(grid, Rectangle(-4.0, 4.0, 0.0, 4.0), points=points)
        self.assertTrue(report.ok, report.violations)

    def test_region_above_grid(self):
        grid = TruncatedGrid(Fraction(0), -2, 0, x_range=(-4.0, 4.0))
        with self.assertRaises(InputError):
            tent_tiling_check(grid, Rectangle(-1.0, 1.0, 2.0, 3.0))


class ModelOperatorTests(SimpleTestCase):

    def setUp(self):
        self.qc = QuadratureConfig()
        self.z = HalfPlanePoint(0.5, 0.5)

    def test_geometric_series_values(self):
        grid = TruncatedGrid(j_max=30)
        self.assertAlmostEqual(dyadic_model_apply(UNIT_BOX, ExponentConfig(2.0), grid, self.z, self.qc),
                               4 / 3, delta=1e-6)
        self.assertAlmostEqual(dyadic_model_apply(UNIT_BOX, ExponentConfig(2.0, a=1.0), grid, self.z, self.qc),
                               2.0, delta=1e-6)

    def test_point_outside_grid_gives_zero(self):
        grid = TruncatedGrid(j_max=3, x_range=(-4.0, 4.0))
        self.assertEqual(dyadic_model_apply(UNIT_BOX, ExponentConfig(2.0), grid, HalfPlanePoint(10.0, 1.0)), 0.0)

    def test_fractional_maximal_of_box(self):
        grid = TruncatedGrid(j_max=10)
        for a in (0.0, 1.0):
            value = fractional_maximal(UNIT_BOX, ONE, ExponentConfig(2.0, a=a), grid, self.z, self.qc)
            self.assertAlmostEqual(value, 1.0, places=9)

    def test_pairing_is_symmetric(self):
        grid = TruncatedGrid(j_min=-4, j_max=4, x_range=(-8.0, 8.0))
        f, g = UNIT_BOX, BoxIndicator(Interval(0.5, 2.0))
        cfg = ExponentConfig(2.0, a=0.5)
        left = model_pairing(f, g, cfg, grid, order="left")
        self.assertGreater(left, 0)
        self.assertAlmostEqual(left, model_pairing(f, g, cfg, grid, order="right"), places=12)
        self.assertAlmostEqual(left, model_pairing(g, f, cfg, grid, order="left"), places=12)

    def test_model_is_self_adjoint_on_random_boxes(self):
        rng = np.random.default_rng(5)
        for n in range(20):
            grid = TruncatedGrid((Fraction(0), THIRD)[n % 2], -4, 3, x_range=(-8.0, 8.0))
            f, g = (BoxIndicator(Interval(float(rng.uniform(-2.0, 2.0)), float(2.0 ** rng.uniform(-3.0, 1.0))))
                    for _ in range(2))
            cfg = ExponentConfig(2.0, alpha=float(rng.uniform(-0.5, 1.0)), a=float(rng.uniform(0.0, 1.5)))
            forward = cell_pairing(f, g, cfg, grid)
            backward = cell_pairing(g, f, cfg, grid)
            scale = 1e-8 * max(abs(forward), 1.0)
            self.assertLessEqual(abs(forward - backward), scale, msg=f'{f}, {g}, {cfg}')
            self.assertAlmostEqual(forward, model_pairing(f, g, cfg, grid), delta=scale)

    def test_pairing_needs_compact_support(self):
        with self.assertRaises(InputError):
            model_pairing(PowerOfModulus(-3.0), PowerOfModulus(1.0), ExponentConfig(2.0), TruncatedGrid(j_max=2))

    def test_maximal_norm_ratio_is_finite(self):
        grid = TruncatedGrid(j_min=-3, j_max=2, x_range=(-2.0, 2.0))
        ratio = maximal_norm_ratio(UNIT_BOX, ONE, ExponentConfig(2.0), grid, self.qc)
        self.assertGreater(ratio, 0)
        self.assertLess(ratio, 10)


class SamplePointTests(SimpleTestCase):

    def test_ranges_and_seed(self):
        points = sample_points(50, seed=7, x_range=(-1.0, 1.0), y_range=(0.25, 4.0))
        self.assertEqual(len(points), 50)
        self.assertTrue(all(-1 <= z.x <= 1 and 0.25 <= z.y <= 4 for z in points))
        self.assertEqual(points, sample_points(50, seed=7, x_range=(-1.0, 1.0), y_range=(0.25, 4.0)))


@tag('slow')
class DominationRunTests(SimpleTestCase):

    def test_constant_is_stable_under_deeper_grids(self):
        functions = [UNIT_BOX, BoxIndicator(Interval(-0.75, 1.0)), 2.0 * BoxIndicator(Interval(-2.0, 6.0))]
        cfg = ExponentConfig(2.0, a=0.5)
        grid = TruncatedGrid(j_min=-14, j_max=7)
        deep = grid.deepened()
        report = domination_run(functions, cfg, sample_points(200, seed=0), grid)
        self.assertEqual(len(report.rows), 600)
        self.assertEqual(len(report.ratios), 600)
        deep_ratios = []
        for row in report.rows:
            z = HalfPlanePoint(row['x'], row['y'])
            model = sum(dyadic_model_apply(row['function'], cfg, deep.with_tag(beta), z) for beta in GRID_TAGS)
            deep_ratios.append(row['s_value'] / model)
        self.assertTrue(np.isfinite(report.max_ratio))
        self.assertLess(abs(max(deep_ratios) / report.max_ratio - 1), 0.10)
        # the empirical constant per function stays within one order of magnitude
        constants = [max(row['ratio'] for row in report.rows if row['function'] == f) for f in functions]
        self.assertLess(max(constants) / min(constants), 10)
