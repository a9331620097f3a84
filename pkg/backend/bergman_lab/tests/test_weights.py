import numpy as np
from django.test import SimpleTestCase, tag

from bergman_lab.exceptions import DegenerateAverageError, InputError, WeightNotInClassError
from bergman_lab.functions import ONE, BoxIndicator, PowerOfHeight, PowerOfModulus, ShiftedKernelPower
from bergman_lab.geometry import Interval
from bergman_lab.quadrature import QuadratureConfig
from bergman_lab.weights import (ExponentConfig, SearchFamily, WeightPair, box_average_sigma,
                                 box_average_u_fractional, bp_bracket, bp_constant, bpq_bracket, bpq_constant,
                                 tent_holder_gap)


class ExponentConfigTests(SimpleTestCase):

    def test_q_defaults_to_p(self):
        cfg = ExponentConfig(3.0)
        self.assertEqual(cfg.q, 3.0)
        self.assertEqual(cfg.p_prime, 1.5)

    def test_balanced_for(self):
        cfg = ExponentConfig.balanced_for(2.0, alpha=0.0, a=0.5)
        self.assertAlmostEqual(cfg.q, 4.0, places=12)
        self.assertTrue(cfg.is_balanced)

    def test_invalid_exponents(self):
        with self.assertRaises(InputError):
            ExponentConfig(3.0, 2.0)
        with self.assertRaises(InputError):
            ExponentConfig(1.0)
        with self.assertRaises(InputError):
            ExponentConfig(2.0, alpha=0.0, a=2.0)
        with self.assertRaises(InputError):
            ExponentConfig(2.0, 3.0, balanced=True)

    def test_dual(self):
        dual = ExponentConfig(1.5, 2.0).dual()
        self.assertAlmostEqual(dual.p, 2.0)
        self.assertAlmostEqual(dual.q, 3.0)


class ConstantTests(SimpleTestCase):

    def setUp(self):
        self.qc = QuadratureConfig()

    def test_constant_weight_bpq(self):
        for alpha in (0.0, 1.0):
            cfg = ExponentConfig(2.0, 3.0, alpha)
            result = bpq_constant(WeightPair.of(ONE, cfg), cfg, SearchFamily.dyadic(j_range=(-1, 1)), self.qc)
            self.assertAlmostEqual(result.value, (1 + alpha) ** -(1 + cfg.q / cfg.p_prime), places=9)

    def test_constant_weight_bp(self):
        result = bp_constant(ONE, 3.0, 0.5, SearchFamily.dyadic(j_range=(-1, 1)), self.qc)
        self.assertAlmostEqual(result.value, 1.5 ** -3, places=9)

    def test_bpq_duality(self):
        cfg = ExponentConfig(1.5, 2.0)
        omega = PowerOfModulus(0.2)
        interval = Interval(0.5, 1.0)
        direct = bpq_bracket(WeightPair.of(omega, cfg), cfg, interval, self.qc)
        dual = bpq_bracket(WeightPair.of(omega.power(-1.0), cfg.dual()), cfg.dual(), interval, self.qc)
        self.assertAlmostEqual(dual / direct ** (cfg.p_prime / cfg.q), 1.0, places=8)

    @tag('slow')
    def test_bpq_duality_on_symbolic_weights(self):
        cfg = ExponentConfig(1.5, 2.0)
        weights = [PowerOfModulus(-0.5), PowerOfModulus(-0.2), PowerOfModulus(0.3), PowerOfModulus(0.6),
                   PowerOfHeight(-0.3), PowerOfHeight(0.2), PowerOfModulus(0.3) * PowerOfHeight(-0.2),
                   PowerOfModulus(-0.4) * PowerOfHeight(0.1), 2.0 * PowerOfModulus(0.1), ShiftedKernelPower(1.0, 0.5)]
        rng = np.random.default_rng(2)
        for omega in weights:
            interval = Interval(float(rng.uniform(-2.0, 2.0)), float(2.0 ** rng.uniform(-2.0, 1.0)))
            direct = bpq_bracket(WeightPair.of(omega, cfg), cfg, interval, self.qc)
            dual = bpq_bracket(WeightPair.of(omega.power(-1.0), cfg.dual()), cfg.dual(), interval, self.qc)
            self.assertAlmostEqual(dual / direct ** (cfg.p_prime / cfg.q), 1.0, delta=1e-6,
                                   msg=f'{omega} on {interval}')

    def test_power_weight_is_dilation_invariant(self):
        omega = PowerOfModulus(0.6)
        small = bp_bracket(omega, 2.0, 0.0, Interval(0.25, 0.5), self.qc)
        large = bp_bracket(omega, 2.0, 0.0, Interval(1.0, 2.0), self.qc)
        self.assertAlmostEqual(small / large, 1.0, places=8)

    def test_non_integrable_weight(self):
        with self.assertRaises(WeightNotInClassError):
            bp_constant(PowerOfModulus(-3.0), 2.0, 0.0, SearchFamily((Interval(0.0, 1.0),)), self.qc)

    def test_search_family(self):
        family = SearchFamily.dyadic(j_range=(0, 1), x_range=(-2.0, 2.0))
        self.assertIn(Interval(0.0, 1.0), family.intervals)
        self.assertIn(Interval(-0.5, 1.0), family.intervals)
        with self.assertRaises(InputError):
            SearchFamily(())


class AverageTests(SimpleTestCase):

    def setUp(self):
        self.qc = QuadratureConfig()

    def test_sigma_average(self):
        cfg = ExponentConfig(2.0)
        value = box_average_sigma(PowerOfHeight(1.0), Interval(0.0, 1.0), WeightPair.of(ONE, cfg), 0.0, self.qc)
        self.assertAlmostEqual(value, 0.5, places=9)

    def test_fractional_u_average(self):
        cfg = ExponentConfig(2.0, 2.0, a=1.0)
        pair = WeightPair.of(ONE, cfg)
        self.assertAlmostEqual(box_average_u_fractional(ONE, Interval(0.0, 1.0), pair, cfg, self.qc), 1.0, places=9)
        self.assertAlmostEqual(box_average_u_fractional(ONE, Interval(0.0, 2.0), pair, cfg, self.qc), 2.0, places=9)

    def test_weight_vanishing_on_box(self):
        pair = WeightPair(ONE, BoxIndicator(Interval(5.0, 1.0)), ONE)
        with self.assertRaises(DegenerateAverageError):
            box_average_sigma(ONE, Interval(0.0, 1.0), pair, 0.0, self.qc)


class TentInequalityTests(SimpleTestCase):

    def setUp(self):
        self.qc = QuadratureConfig()

    def test_equality_for_constant_weight(self):
        cfg = ExponentConfig(2.0, balanced=True)
        lhs, rhs = tent_holder_gap(WeightPair.of(ONE, cfg), cfg, Interval(0.0, 1.0), self.qc)
        self.assertAlmostEqual(lhs, rhs, places=9)

    def test_power_weight(self):
        cfg = ExponentConfig.balanced_for(2.0, alpha=0.0, a=0.5)
        pair = WeightPair.of(PowerOfModulus(0.3), cfg)
        for interval in (Interval(0.0, 1.0), Interval(-2.0, 0.5), Interval(3.0, 4.0)):
            lhs, rhs = tent_holder_gap(pair, cfg, interval, self.qc)
            self.assertLessEqual(lhs, rhs * (1 + 1e-9))

    def test_needs_balance(self):
        cfg = ExponentConfig(2.0, 3.0)
        with self.assertRaises(InputError):
            tent_holder_gap(WeightPair.of(ONE, cfg), cfg, Interval(0.0, 1.0), self.qc)
