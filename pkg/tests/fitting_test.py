import unittest

import numpy as np

from critnet.errors import InsufficientDataError, NoVarianceError
from critnet.stats import ccdf, fit_power_law, summarize


def pareto_sample(m: float, n: int, xmin: float, seed: int) -> np.ndarray:
    """Continuous sample with PDF ~ x^-m above xmin, by inverse transform."""
    u = np.random.default_rng(seed).random(n)
    return xmin * (1.0 - u) ** (-1.0 / (m - 1.0))


class TestCCDF(unittest.TestCase):
    def test_examples(self):
        x, p = ccdf([1, 1, 2, 4])
        np.testing.assert_array_equal(x, [1, 2, 4])
        np.testing.assert_allclose(p, [1.0, 0.5, 0.25])
        x, p = ccdf([7.5])
        np.testing.assert_array_equal(p, [1.0])

    def test_properties(self):
        values = np.random.default_rng(0).exponential(size=500)
        x, p = ccdf(values)
        self.assertEqual(p[0], 1.0)
        self.assertTrue(np.all(np.diff(p) < 0))
        _, q = ccdf(np.random.default_rng(1).permutation(values))
        np.testing.assert_array_equal(p, q)

    def test_empty(self):
        with self.assertRaises(InsufficientDataError):
            ccdf([])


class TestFitPowerLaw(unittest.TestCase):
    def setUp(self):
        self.sample = pareto_sample(2.5, 100_000, 1.0, seed=0)

    def test_exact_ccdf_points(self):
        n, m = 200, 2.7
        i = np.arange(1, n + 1)
        x = (n / i) ** (1.0 / (m - 1.0))
        fit = fit_power_law(x, method="ccdf", xmin=1.0)
        self.assertAlmostEqual(fit.exponent, m, delta=1e-6)
        self.assertAlmostEqual(fit.raw_slope, 1.0 - m, delta=1e-6)
        self.assertAlmostEqual(fit.r_squared, 1.0, delta=1e-9)
        self.assertEqual(fit.convention, "pdf")

    def test_mle_pareto(self):
        fit = fit_power_law(self.sample, method="mle", xmin=1.0)
        self.assertAlmostEqual(fit.exponent, 2.5, delta=0.05)
        self.assertEqual(fit.n_points, 100_000)
        self.assertIsNotNone(fit.log_likelihood)
        self.assertIsNone(fit.r_squared)

    def test_ccdf_pareto(self):
        fit = fit_power_law(self.sample, method="ccdf", xmin=1.0)
        self.assertAlmostEqual(fit.exponent, 2.5, delta=0.1)
        self.assertGreater(fit.r_squared, 0.95)

    def test_scale_equivariance(self):
        small = self.sample[:5000]
        fit = fit_power_law(small, method="mle", xmin=1.0)
        scaled = fit_power_law(small * 7.0, method="mle", xmin=7.0)
        self.assertAlmostEqual(fit.exponent, scaled.exponent, delta=1e-9)

    def test_auto_xmin(self):
        rng = np.random.default_rng(3)
        body = rng.uniform(0.1, 2.0, size=5000)
        tail = pareto_sample(2.5, 20_000, 2.0, seed=4)
        fit = fit_power_law(np.concatenate([body, tail]), method="mle")
        self.assertGreaterEqual(fit.xmin, 1.5)
        self.assertAlmostEqual(fit.exponent, 2.5, delta=0.2)

    def test_discrete(self):
        sizes = np.round(pareto_sample(2.5, 50_000, 1.0, seed=5))
        fit = fit_power_law(sizes, method="mle", xmin=5, discrete=True)
        self.assertTrue(fit.discrete)
        self.assertAlmostEqual(fit.exponent, 2.5, delta=0.1)

    def test_errors(self):
        with self.assertRaises(InsufficientDataError):
            fit_power_law(np.arange(1.0, 11.0))
        with self.assertRaises(NoVarianceError):
            fit_power_law(np.full(40, 3.0))
        with self.assertRaises(InsufficientDataError):
            fit_power_law(self.sample, xmin=1e9)
        with self.assertRaises(ValueError):
            fit_power_law(self.sample, method="mle", xmax=10.0)


class TestSummarize(unittest.TestCase):
    def test_gaussian(self):
        summary = summarize(np.random.default_rng(0).standard_normal(100_000))
        self.assertAlmostEqual(summary.excess_kurtosis, 0.0, delta=0.1)
        self.assertAlmostEqual(summary.std, 1.0, delta=0.02)
        widths = np.diff(summary.bin_edges)
        self.assertAlmostEqual(np.sum(summary.density * widths), 1.0, delta=1e-9)

    def test_two_point(self):
        summary = summarize(np.tile([-1.0, 1.0], 50))
        self.assertAlmostEqual(summary.excess_kurtosis, -2.0, delta=1e-12)
        self.assertAlmostEqual(summary.skewness, 0.0, delta=1e-12)

    def test_heavy_tail(self):
        x = np.random.default_rng(1).standard_t(3, size=50_000)
        summary = summarize(x, bins=50)
        self.assertGreater(summary.excess_kurtosis, 0.0)
        self.assertEqual(summary.density.size, 50)

    def test_errors(self):
        with self.assertRaises(InsufficientDataError):
            summarize([1.0, 2.0, 3.0])
        with self.assertRaises(NoVarianceError):
            summarize(np.ones(10))


if __name__ == "__main__":
    unittest.main()
