import unittest
import warnings

import numpy as np

from critnet.analytics import (
    BINARY_LAW,
    critical_threshold,
    expected_offspring,
    galton_watson_sizes,
    offspring_law,
    offspring_mean,
    otter_check,
    sample_offspring,
)
from critnet.errors import DomainError


class TestOffspringLaw(unittest.TestCase):
    def setUp(self):
        self.solution = critical_threshold(2.34, 1)
        self.pmf = offspring_law(2.34, self.solution.omega)

    def test_probability_law(self):
        self.assertAlmostEqual(self.pmf.sum(), 1.0, delta=1e-12)
        self.assertTrue(np.all(self.pmf >= 0))
        self.assertEqual(self.pmf.size, 10_001)

    def test_mean_is_closure_sum(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            closure = expected_offspring(self.solution, k_max=10_000)
        self.assertAlmostEqual(
            offspring_mean(self.pmf), closure.expected_offspring, delta=1e-12
        )
        self.assertAlmostEqual(offspring_mean(self.pmf), 1.0, delta=1e-3)

    def test_too_small_omega(self):
        with self.assertRaises(DomainError):
            offspring_law(0.5, 1.0)

    def test_monte_carlo_mean(self):
        est = sample_offspring(self.pmf, 200_000, np.random.default_rng(0))
        self.assertEqual(est.n_trials, 200_000)
        self.assertGreater(est.std_error, 0.0)
        self.assertLess(abs(est.expected_offspring - 1.0), 5 * est.std_error)


class TestGaltonWatson(unittest.TestCase):
    def test_sizes(self):
        rng = np.random.default_rng(2)
        self.assertTrue(np.all(galton_watson_sizes([1.0], 100, rng) == 1))
        sizes = galton_watson_sizes(BINARY_LAW, 5000, rng, max_size=500)
        # binary trees have an odd number of nodes unless censored
        self.assertTrue(np.all((sizes % 2 == 1) | (sizes == 500)))
        self.assertLessEqual(sizes.max(), 500)
        self.assertAlmostEqual((sizes == 1).mean(), 0.5, delta=0.03)


class TestOtterCheck(unittest.TestCase):
    def test_binary_branching(self):
        result = otter_check(
            0.0, 1.0, 100_000, np.random.default_rng(0), pmf=BINARY_LAW
        )
        self.assertAlmostEqual(result.exponent, 1.5, delta=0.2)
        self.assertEqual(result.offspring.expected_offspring, 1.0)

    def test_model_law(self):
        solution = critical_threshold(2.34, 1)
        result = otter_check(2.34, solution.omega, 100_000, np.random.default_rng(1))
        self.assertAlmostEqual(result.exponent, 1.5, delta=0.2)
        self.assertGreater(result.fit.r_squared, 0.9)

    def test_supercritical_warning(self):
        with self.assertWarnsRegex(RuntimeWarning, "supercritical"):
            otter_check(
                0.0,
                1.0,
                2000,
                np.random.default_rng(0),
                pmf=np.array([0.2, 0.3, 0.5]),
                max_size=400,
            )

    def test_small_sample_warning(self):
        with self.assertWarnsRegex(RuntimeWarning, "fewer than 100000"):
            result = otter_check(
                0.0, 1.0, 20_000, np.random.default_rng(3), pmf=BINARY_LAW
            )
        self.assertEqual(result.offspring.expected_offspring, 1.0)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            otter_check(0.0, 1.0, 100_000, np.random.default_rng(3), pmf=BINARY_LAW)
        self.assertFalse([w for w in caught if "fewer than" in str(w.message)])


if __name__ == "__main__":
    unittest.main()
