import numpy as np
from django.test import SimpleTestCase, tag

from bergman_lab.exceptions import DivergenceError, InfeasibleError, InputError
from bergman_lab.quadrature import QuadratureConfig
from bergman_lab.schur import (OffDiagonalConfig, SchurParameters, admissibility, exponent_chains,
                               lemma_norm_scaling, random_configs, schur_bound_check, solve_rst,
                               verify_schur_conditions)

WORKED = OffDiagonalConfig(2.0, 2.0)


class ConfigTests(SimpleTestCase):

    def test_derived_parameters(self):
        self.assertEqual(WORKED.omega_param, -2.0)
        self.assertEqual(WORKED.b, 1.0)
        cfg = OffDiagonalConfig(1.5, 3.0, 0.5, 1.0, 0.25)
        self.assertAlmostEqual(cfg.omega_param, cfg.a - cfg.b - cfg.alpha_src - 1, places=12)

    def test_default_target_keeps_b(self):
        cfg = OffDiagonalConfig.with_default_target(2.0, 3.0, 0.5, a=0.0)
        self.assertAlmostEqual(cfg.b, cfg.a + 1, places=12)

    def test_invalid(self):
        with self.assertRaises(InputError):
            OffDiagonalConfig(3.0, 2.0)
        with self.assertRaises(InputError):
            OffDiagonalConfig(2.0, 2.0, beta_tgt=-1.0)

    def test_admissibility(self):
        self.assertTrue(admissibility(WORKED))
        self.assertFalse(admissibility(OffDiagonalConfig(2.0, 2.0, 0.5, 0.0, -0.6)))
        # equality is not enough
        self.assertFalse(admissibility(OffDiagonalConfig(2.0, 2.0, 1.0, 0.0, 0.0)))


class SolverTests(SimpleTestCase):

    def test_worked_point(self):
        sp = SchurParameters.from_rs(WORKED, 1 / 3, 1 / 6)
        self.assertAlmostEqual(sp.t, 7 / 12, places=14)
        self.assertAlmostEqual(sp.one_minus_t, 5 / 12, places=14)
        self.assertGreater(sp.min_slack(WORKED), 0)

    def test_scan_finds_centre_of_worked_region(self):
        sp = solve_rst(WORKED)
        self.assertAlmostEqual(sp.r, 1 / 3, delta=0.01)
        self.assertAlmostEqual(sp.s, 1 / 6, delta=0.01)
        self.assertTrue(sp.ordered)

    def test_infeasible_point(self):
        with self.assertRaises(InfeasibleError):
            SchurParameters.from_rs(WORKED, 0.6, 0.1)

    def test_inadmissible_is_infeasible(self):
        with self.assertRaisesMessage(InfeasibleError, "alpha+1 < p(a+1) fails"):
            solve_rst(OffDiagonalConfig(2.0, 2.0, 0.5, 0.0, -0.6))

    def test_unordered_fallback(self):
        # a < alpha with beta near -1 leaves no point with r > s
        cfg = OffDiagonalConfig(2.0, 2.0, 1.0, -0.9, 0.1)
        sp = solve_rst(cfg)
        self.assertFalse(sp.ordered)
        self.assertGreater(sp.min_slack(cfg), 0)
        self.assertTrue(0 < sp.t < 1)

    def test_random_configs(self):
        rng = np.random.default_rng(2024)
        for cfg in random_configs(rng, 200, admissible=True):
            sp = solve_rst(cfg, resolution=64)
            self.assertGreater(sp.min_slack(cfg), 0, cfg)
            self.assertTrue(0 < sp.t < 1, cfg)
            self.assertAlmostEqual(sp.t + sp.one_minus_t, 1.0, places=14)
            for lhs, rhs in exponent_chains(cfg, sp):
                self.assertAlmostEqual(lhs, rhs, delta=1e-12 * max(1.0, abs(rhs)))
        for cfg in random_configs(rng, 200, admissible=False):
            self.assertFalse(admissibility(cfg))
            with self.assertRaises(InfeasibleError):
                solve_rst(cfg, resolution=64)


class SchurIntegralTests(SimpleTestCase):

    def test_ratios_are_constant_in_height(self):
        report = verify_schur_conditions(WORKED, solve_rst(WORKED), samples=10)
        self.assertEqual(len(report.rows), 10)
        self.assertTrue(report.is_constant(0.02), report.spread)
        self.assertGreater(report.m1, 0)
        self.assertGreater(report.m2, 0)

    @tag('slow')
    def test_schur_bound_on_box(self):
        report = verify_schur_conditions(WORKED, solve_rst(WORKED), samples=4)
        qc = QuadratureConfig(x_range=(-8.0, 8.0), y_max=8.0, nodes=3, radial_layers=8, angular_layers=3,
                              tolerance=5e-2, max_depth=0)
        bound = schur_bound_check(report, qc=qc, inner_qc=qc)
        self.assertTrue(bound.holds, (bound.lhs, bound.rhs))


class KernelScalingTests(SimpleTestCase):

    def test_slopes(self):
        for p, nu, gamma in ((2.0, 0.0, 2.0), (2.0, 1.0, 2.0)):
            fit, rows = lemma_norm_scaling(p, nu, gamma)
            expected = -p * gamma + nu + 2
            self.assertAlmostEqual(fit.slope, expected, delta=0.01 * abs(expected))
            self.assertEqual(len(rows), 4)
            self.assertEqual(rows[0]["expected_slope"], expected)

    def test_boundary_gamma_diverges(self):
        with self.assertRaises(DivergenceError):
            lemma_norm_scaling(2.0, 0.0, 1.0)
