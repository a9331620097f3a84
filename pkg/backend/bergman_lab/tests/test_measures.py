import math

import numpy as np
from django.test import SimpleTestCase
from scipy import integrate as scipy_integrate

from bergman_lab.exceptions import DivergenceError, ToleranceNotMetError
from bergman_lab.experiments import fit_loglog
from bergman_lab.functions import (ONE, BoxIndicator, PowerOfHeight, PowerOfModulus, ShiftedKernelPower,
                                   TruncatedPower)
from bergman_lab.geometry import CarlesonBox, Interval, Rectangle, Tent, alpha_measure_box
from bergman_lab.measures import lp_norm, lp_power, region_integral, weighted_region_measure
from bergman_lab.quadrature import QuadratureConfig


class RegionMeasureTests(SimpleTestCase):

    def setUp(self):
        self.qc = QuadratureConfig()

    def test_tent_with_height_squared(self):
        result = weighted_region_measure(Tent(Interval(0.0, 1.0)), PowerOfHeight(2.0), 0.0, self.qc)
        self.assertAlmostEqual(result.value, 7 / 24, places=9)

    def test_constant_weight_matches_closed_form(self):
        interval = Interval(-3.0, 2.0)
        for alpha in (-0.5, 0.0, 2.0):
            result = weighted_region_measure(CarlesonBox(interval), ONE, alpha, self.qc)
            self.assertAlmostEqual(result.value / alpha_measure_box(interval, alpha), 1.0, places=8)

    def test_kernel_over_box_matches_scipy(self):
        f = ShiftedKernelPower(1.0, 2.0)
        expected, _ = scipy_integrate.dblquad(lambda y, x: (x * x + (y + 1) ** 2) ** -1, 0.0, 1.0, 0.0, 1.0)
        result = region_integral(f, Rectangle(0.0, 1.0, 0.0, 1.0), 0.0, self.qc)
        self.assertAlmostEqual(result.value, expected, places=8)

    def test_disjoint_support_is_zero(self):
        result = region_integral(BoxIndicator(Interval(5.0, 1.0)), Rectangle(0.0, 1.0, 0.0, 1.0), 0.0, self.qc)
        self.assertEqual(result.value, 0.0)


class NormTests(SimpleTestCase):

    def setUp(self):
        self.qc = QuadratureConfig()

    def test_unit_box_norm(self):
        self.assertAlmostEqual(lp_norm(BoxIndicator(Interval(0.0, 1.0)), 3.0, 0.0, self.qc), 1.0, places=9)

    def test_box_norm_with_weight(self):
        # ||1_Q||_{p,nu}^p = |Q|_nu
        value = lp_power(BoxIndicator(Interval(0.0, 2.0)), 2.0, 1.0, self.qc).value
        self.assertAlmostEqual(value, 4.0, places=8)

    def test_shifted_kernel_norm(self):
        value = lp_power(ShiftedKernelPower(1.0, 2.0), 2.0, 0.0, self.qc).value
        self.assertAlmostEqual(value, math.pi / 4, delta=1e-4)

    def test_slow_kernel_diverges(self):
        with self.assertRaisesMessage(DivergenceError, "needs gamma > (nu+2)/p"):
            lp_power(ShiftedKernelPower(1.0, 1.0), 2.0, 0.0, self.qc)

    def test_unconverged_norm_is_an_error(self):
        qc = QuadratureConfig(nodes=2, max_depth=0, tolerance=1e-15)
        self.assertFalse(lp_power(ShiftedKernelPower(1.0, 2.0), 2.0, 0.0, qc).converged)
        with self.assertRaises(ToleranceNotMetError) as caught:
            lp_norm(ShiftedKernelPower(1.0, 2.0), 2.0, 0.0, qc)
        self.assertGreater(caught.exception.result.value, 0)

    def test_weighted_power_norm_scales_like_inverse_delta(self):
        # |z|^(delta-2) on the unit half disc has mass pi/delta
        p = 3.0
        p_prime = p / (p - 1)
        points = []
        for delta in (0.4, 0.2, 0.1, 0.05):
            f = TruncatedPower(delta - 2, 1.0) * PowerOfModulus((2 - delta) / p_prime)
            norm = lp_norm(f, p, 0.0, self.qc)
            self.assertAlmostEqual(norm ** p * delta / math.pi, 1.0, places=6)
            points.append((1 / delta, norm))
        self.assertAlmostEqual(fit_loglog(points).slope, 1 / p, places=6)


class RandomBoxTests(SimpleTestCase):

    def test_constant_weight_on_random_boxes(self):
        qc = QuadratureConfig()
        rng = np.random.default_rng(11)
        for _ in range(100):
            interval = Interval(float(rng.uniform(-5.0, 5.0)), float(2.0 ** rng.uniform(-4.0, 3.0)))
            alpha = float(rng.uniform(-0.9, 2.0))
            result = weighted_region_measure(CarlesonBox(interval), ONE, alpha, qc)
            expected = alpha_measure_box(interval, alpha)
            self.assertLessEqual(abs(result.value - expected), qc.tolerance * expected, msg=f'{interval}, {alpha}')
