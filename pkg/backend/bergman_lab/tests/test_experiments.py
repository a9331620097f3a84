import math

from django.test import SimpleTestCase, tag

from bergman_lab.exceptions import InputError
from bergman_lab.experiments import (GROWTH_FACTOR, STABLE_VARIATION, SharpnessConfig, _sharpness_row, _verdict,
                                     fit_loglog, offdiag_sweep, sharpness_function, sharpness_run, sharpness_weight,
                                     sweep_functions)
from bergman_lab.management.commands.offdiag_sweep import sweep_configs
from bergman_lab.operators import OperatorSpec
from bergman_lab.schur import OffDiagonalConfig, admissibility
from bergman_lab.weights import ExponentConfig


class FitTests(SimpleTestCase):

    def test_exact_power(self):
        fit = fit_loglog([(1.0, 1.0), (2.0, 4.0), (4.0, 16.0)])
        self.assertAlmostEqual(fit.slope, 2.0, places=12)
        self.assertAlmostEqual(fit.residual, 0.0, places=12)

    def test_constant(self):
        fit = fit_loglog([(1.0, 3.0), (10.0, 3.0), (100.0, 3.0)])
        self.assertAlmostEqual(fit.slope, 0.0, places=12)
        self.assertAlmostEqual(math.exp(fit.intercept), 3.0, places=12)

    def test_invalid_points(self):
        with self.assertRaises(InputError):
            fit_loglog([(1.0, 1.0), (2.0, 2.0)])
        with self.assertRaises(InputError):
            fit_loglog([(1.0, 1.0), (1.0, 2.0), (2.0, 3.0)])
        with self.assertRaises(InputError):
            fit_loglog([(1.0, 1.0), (2.0, -2.0), (3.0, 3.0)])


class SharpnessConfigTests(SimpleTestCase):

    def test_expected_slopes(self):
        sc = SharpnessConfig(ExponentConfig(2.0, balanced=True))
        self.assertEqual(sc.expected_slopes, {"weight": 1.0, "source": 0.5, "ratio": 1.0})
        self.assertEqual(sc.expected_exponent, 1.0)
        self.assertEqual(sc.spec, OperatorSpec.fractional_s(0.0, 0.0))

    def test_validation(self):
        with self.assertRaises(InputError):
            SharpnessConfig(ExponentConfig(2.0, 3.0))
        with self.assertRaises(InputError):
            SharpnessConfig(ExponentConfig(2.0, balanced=True), delta_list=(0.1, 0.2, 0.05))
        with self.assertRaises(InputError):
            SharpnessConfig(ExponentConfig(2.0, balanced=True), delta_list=(1.5, 0.5, 0.1))
        with self.assertRaises(InputError):
            SharpnessConfig(ExponentConfig(2.0, balanced=True), operator="positive_bergman")
        # p'/q < 1
        with self.assertRaises(InputError):
            SharpnessConfig(ExponentConfig.balanced_for(3.0, alpha=0.0, a=0.5))

    def test_test_functions(self):
        cfg = ExponentConfig(2.0, balanced=True)
        self.assertAlmostEqual(sharpness_weight(cfg, 0.2).exponent, 0.9, places=14)
        f = sharpness_function(cfg, 0.2)
        self.assertAlmostEqual(f.exponent, -1.8, places=14)
        self.assertEqual(f.radius, 1.0)


class VerdictTests(SimpleTestCase):

    def test_verdicts(self):
        self.assertEqual(_verdict([1.0, 1.05, 1.02]), "stable")
        self.assertEqual(_verdict([1.0, 1.6, 2.5]), "growing")
        self.assertEqual(_verdict([1.0, 1.3, 1.5]), "unclear")
        self.assertEqual(_verdict([1.0, None, 1.0]), "error")

    def test_sweep_functions(self):
        cfg = OffDiagonalConfig(2.0, 2.0, 0.5, 0.5, -0.6)
        box, weighted = sweep_functions(cfg)
        self.assertAlmostEqual(weighted.factors()[0].exponent, -1.1, places=14)

    def test_default_configs(self):
        configs = sweep_configs(None)
        self.assertEqual([admissibility(cfg) for cfg in configs], [True, True, False])
        self.assertAlmostEqual(configs[1].beta_tgt, 2.0)
        self.assertAlmostEqual(configs[1].b, 1.0)

    def test_sweep_needs_three_truncations(self):
        with self.assertRaises(InputError):
            offdiag_sweep(sweep_configs(None), truncations=(32.0, 128.0))


@tag('slow')
class SharpnessRunTests(SimpleTestCase):

    def assertSlopes(self, result):
        expected = result.config.expected_slopes
        self.assertEqual(len(result.rows), 4)
        self.assertTrue(all(row.get("error") is None for row in result.rows))
        self.assertLess(abs(result.fits["source"].slope / expected["source"] - 1), 0.05)
        self.assertLess(abs(result.fits["weight"].slope / expected["weight"] - 1), 0.05)
        self.assertGreaterEqual(result.fits["ratio"].slope, 0.95 * expected["ratio"])
        self.assertAlmostEqual(result.weight_exponent / result.config.expected_exponent, 1.0, delta=0.10)

    def test_bergman_case(self):
        result = sharpness_run(SharpnessConfig(ExponentConfig(2.0, balanced=True)), n_jobs=-1)
        self.assertSlopes(result)
        self.assertAlmostEqual(result.pott_reguera, 1.0, delta=0.10)
        self.assertEqual(result.rows[0]["pott_reguera"], result.pott_reguera)

    def test_off_diagonal_case(self):
        sc = SharpnessConfig(ExponentConfig(4 / 3, 2.0, a=0.5, balanced=True))
        for name, value in {"weight": 0.5, "source": 0.75, "ratio": 0.75}.items():
            self.assertAlmostEqual(sc.expected_slopes[name], value, places=12)
        self.assertAlmostEqual(sc.expected_exponent, 1.5, places=12)
        result = sharpness_run(sc, n_jobs=-1)
        self.assertSlopes(result)
        self.assertIsNone(result.pott_reguera)

    def test_t_dominates_s_on_the_sharp_example(self):
        cfg = ExponentConfig(4 / 3, 2.0, a=0.5, balanced=True)
        s_row = _sharpness_row(SharpnessConfig(cfg), 0.2)
        t_row = _sharpness_row(SharpnessConfig(cfg, operator="fractional_t"), 0.2)
        self.assertEqual(str(t_row["operator"]), str(OperatorSpec.fractional_t(0.0, 0.5)))
        self.assertEqual(t_row["weight_constant"], s_row["weight_constant"])
        self.assertEqual(t_row["source_norm"], s_row["source_norm"])
        self.assertGreaterEqual(t_row["ratio"], s_row["ratio"] * (1 - 1e-3))


@tag('slow')
class SweepTests(SimpleTestCase):

    def test_admissibility_dichotomy(self):
        rows = offdiag_sweep(sweep_configs(None), n_jobs=-1)
        self.assertEqual(len(rows), 6)
        for row in rows:
            ratios = [row["ratio_small"], row["ratio_medium"], row["ratio_large"]]
            if row["admissible"]:
                self.assertLess(max(ratios) / min(ratios) - 1, STABLE_VARIATION, row)
                self.assertEqual(row["verdict"], "stable")
            self.assertTrue(row["consistent"], row)
        growth = {}
        for row in rows:
            if not row["admissible"]:
                growth.setdefault((row["p"], row["q"], row["alpha"], row["a"]), []).append(row["growth"])
        self.assertEqual(len(growth), 1)
        for config, values in growth.items():
            self.assertGreaterEqual(max(values), GROWTH_FACTOR, config)
