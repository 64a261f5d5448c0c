"""Desk-scale reproduction runs, enabled with CRITNET_SLOW=1."""

import os
import unittest

import numpy as np
from omegaconf import OmegaConf

from critnet.defaults import defaults
from critnet.economy import SimConfig, run
from critnet.runner import measured_gamma
from critnet.stats import fit_power_law, log_returns, summarize

SLOW = bool(os.environ.get("CRITNET_SLOW"))
SEEDS = range(5)


def desk_config(seed: int, n_agents: int = 2000) -> SimConfig:
    cfg = OmegaConf.merge(
        defaults.sim,
        OmegaConf.load("configs/economy/base.yaml").sim,
        {"n_agents": n_agents, "check_invariants": True},
    )
    return SimConfig.from_cfg(cfg, seed=seed)


@unittest.skipUnless(SLOW, "set CRITNET_SLOW=1 for desk-scale runs")
class TestDeskScale(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.results = [run(desk_config(seed)) for seed in SEEDS]

    def avalanche_exponent(self, result) -> float:
        return fit_power_law(result.avalanche_sizes, method="ccdf", xmin=1).exponent

    def test_avalanche_exponent(self):
        for result in self.results:
            self.assertAlmostEqual(self.avalanche_exponent(result), 2.51, delta=0.35)

    def test_system_size(self):
        small = np.mean([self.avalanche_exponent(r) for r in self.results])
        large = self.avalanche_exponent(run(desk_config(0, n_agents=4000)))
        self.assertAlmostEqual(small, large, delta=0.2)

    def test_degree_exponent(self):
        for result in self.results:
            self.assertEqual(len(result.degree_snapshots), 4)
            for snapshot in result.degree_snapshots:
                gamma = measured_gamma(snapshot.in_degrees)
                self.assertGreaterEqual(gamma, 2.0)
                self.assertLessEqual(gamma, 2.8)

    def test_exponent_relation(self):
        for result in self.results:
            gamma = measured_gamma(result.degree_snapshots[-1].in_degrees)
            m = self.avalanche_exponent(result)
            self.assertLessEqual(abs(m - (1.5 * gamma - 1.0)), 0.3)

    def test_heavy_tails(self):
        for result in self.results:
            returns = log_returns(result.index_values).values
            self.assertGreater(summarize(returns).excess_kurtosis, 0.0)
            control = np.random.default_rng(0).standard_normal(returns.size)
            self.assertLess(abs(summarize(control).excess_kurtosis), 0.2)


if __name__ == "__main__":
    unittest.main()
