"""Runner tests of the three workflows on small configs."""

import os
import tempfile
import unittest

import numpy as np
import pandas as pd
from omegaconf import OmegaConf

from critnet.analytics import critical_threshold
from critnet.data import RunManifest
from critnet.data.utils import read_key_values, read_simulation_h5
from critnet.defaults import defaults
from critnet.errors import DomainError, InsufficientDataError
from critnet.runner import classify, merge_replicas, run_workflow
from critnet.stats import fit_power_law

GOLDEN = os.path.join(os.path.dirname(__file__), "golden")
SAMPLE_INDEX = os.path.join(
    os.path.dirname(__file__), "index_data", "synthetic_index.csv"
)


def write_pareto_drawdown_index(path: str, n_events: int, seed: int) -> None:
    """Closes alternating between 1 and exp(-d), d ~ 0.01 Pareto with PDF exponent 2.5.

    Every drawdown is a single negative return of magnitude d, followed by a recovery.
    """
    u = np.random.default_rng(seed).random(n_events)
    drops = 0.01 * (1.0 - u) ** (-1.0 / 1.5)
    closes = np.ones(2 * n_events + 1)
    closes[1::2] = np.exp(-drops)
    dates = pd.date_range("1990-01-01", periods=closes.size, freq="D")
    pd.DataFrame({"Date": dates.strftime("%Y-%m-%d"), "Close": closes}).to_csv(
        path, index=False
    )


class TestSimulate(unittest.TestCase):
    """simulate writes its artifacts and a consistent summary."""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.cfg = OmegaConf.create(
            {
                "mode": "simulate",
                "seed": 2,
                "sim": {
                    "n_agents": 300,
                    "gamma_target": 2.5,
                    "d_th": "auto",
                    "n_steps": 3000,
                },
                "fit": {"method": "mle", "xmin": 1},
                "logging": {"out_dir": self.tmp.name, "log_steps": None},
            }
        )
        # overwrite defaults with user-defined config
        self.cfg = OmegaConf.merge(defaults, self.cfg)

    def tearDown(self):
        self.tmp.cleanup()

    def test_outputs(self):
        summary = run_workflow(self.cfg)
        out = self.tmp.name
        for name in [
            "index_series.csv",
            "avalanches.csv",
            "graph_snapshot.txt",
            "simulation.h5",
            "summary.txt",
            "config.yaml",
            "manifest.txt",
        ]:
            self.assertTrue(os.path.isfile(os.path.join(out, name)), name)

        series = pd.read_csv(os.path.join(out, "index_series.csv"))
        self.assertEqual(list(series.columns), ["step", "U_t", "alpha_mean"])
        self.assertEqual(len(series), 600)
        avalanches = pd.read_csv(os.path.join(out, "avalanches.csv"))
        self.assertEqual(len(avalanches), summary["n_avalanches"])

        archive = read_simulation_h5(os.path.join(out, "simulation.h5"))
        np.testing.assert_array_equal(archive["step"], series["step"].to_numpy())
        self.assertEqual(archive["avalanches"].shape, (len(avalanches), 4))

    def test_manifest_records_solved_threshold(self):
        run_workflow(self.cfg)
        manifest = RunManifest.read(os.path.join(self.tmp.name, "manifest.txt"))
        self.assertEqual(manifest.d_th, critical_threshold(2.5, 1).d_th)
        self.assertEqual(manifest.seed, 2)
        self.assertEqual(manifest.config["sim.d_th"], "auto")
        self.assertIn("avalanches", manifest.outputs)

    def test_fitted_exponent_round_trip(self):
        summary = run_workflow(self.cfg)
        stored = read_key_values(os.path.join(self.tmp.name, "summary.txt"))
        sizes = pd.read_csv(os.path.join(self.tmp.name, "avalanches.csv"))["size_s"]
        self.assertGreaterEqual(len(sizes), 30)
        self.assertGreater(sizes.max(), 1)
        fit = fit_power_law(sizes.to_numpy(), method="mle", xmin=1.0, discrete=True)
        self.assertAlmostEqual(float(stored["fitted_m"]), fit.exponent, delta=1e-9)
        self.assertEqual(summary["fitted_m"], fit.exponent)
        self.assertGreater(summary["final_edges"], 0)

    def test_golden_files(self):
        # two agents trade back and forth: every price is exactly 1 and nobody ever
        # reaches k_out > 19 k_in, so the output does not depend on the draws
        self.cfg.sim.update(
            {"n_agents": 2, "k_out_init": 1, "d_th": 0.9, "n_steps": 15}
        )
        summary = run_workflow(self.cfg)
        self.assertEqual(summary["final_edges"], 17)
        for name in ["index_series.csv", "avalanches.csv"]:
            with open(os.path.join(GOLDEN, name), "rb") as f:
                expected = f.read()
            with open(os.path.join(self.tmp.name, name), "rb") as f:
                self.assertEqual(f.read(), expected, name)

    def test_empty_run(self):
        self.cfg.sim.n_steps = 0
        summary = run_workflow(self.cfg)
        with open(os.path.join(self.tmp.name, "avalanches.csv")) as f:
            header = f.read()
        self.assertEqual(header, "trigger_step,size_s,node_count_r,edges_removed\n")
        self.assertEqual(summary["n_avalanches"], 0)
        self.assertEqual(summary["fitted_m"], "n/a")

    def test_replicas(self):
        self.cfg.sim.update({"n_agents": 40, "n_steps": 100, "replicas": 2})
        merged = run_workflow(self.cfg)
        self.assertEqual(merged["replicas"], 2)
        for r in range(2):
            manifest = RunManifest.read(
                os.path.join(self.tmp.name, f"replica_{r}", "manifest.txt")
            )
            self.assertEqual(manifest.seed, 2 + r)
        self.assertTrue(
            os.path.isfile(os.path.join(self.tmp.name, "replicas_summary.txt"))
        )


class TestAnalyze(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.input = os.path.join(self.tmp.name, "pareto.csv")
        self.cfg = OmegaConf.merge(
            defaults,
            {
                "mode": "analyze",
                "analyze": {"input": self.input, "xmin": 0.01, "method": "mle"},
                "logging": {"out_dir": os.path.join(self.tmp.name, "out")},
            },
        )

    def tearDown(self):
        self.tmp.cleanup()

    def test_pareto_drawdowns(self):
        write_pareto_drawdown_index(self.input, 5000, seed=0)
        report = run_workflow(self.cfg)
        self.assertEqual(report["n_events"], 5000)
        self.assertGreaterEqual(report["exponent"], 2.4)
        self.assertLessEqual(report["exponent"], 2.6)
        self.assertTrue(report["in_predicted_band"])
        for name in ["drawdowns.csv", "ccdf.csv", "pdf.csv", "fit_report.txt"]:
            self.assertTrue(os.path.isfile(os.path.join(self.tmp.name, "out", name)))

    def test_bundled_sample(self):
        self.cfg.analyze.update({"input": SAMPLE_INDEX, "xmin": "auto"})
        report = run_workflow(self.cfg)
        self.assertEqual(report["n_levels"], 7942)
        self.assertEqual(report["n_events"], 2000)
        self.assertGreaterEqual(report["exponent"], 2.0)
        self.assertLessEqual(report["exponent"], 3.1)

    def test_rising_series(self):
        dates = pd.date_range("2000-01-03", periods=100, freq="D")
        pd.DataFrame(
            {"Date": dates.strftime("%Y-%m-%d"), "Close": np.arange(1.0, 101.0)}
        ).to_csv(self.input, index=False)
        with self.assertRaises(InsufficientDataError):
            run_workflow(self.cfg)


class TestPredict(unittest.TestCase):
    def setUp(self):
        self.cfg = OmegaConf.merge(
            defaults, {"mode": "predict", "predict": {"gamma": 2.34, "k0": 1}}
        )

    def test_exponent(self):
        report = run_workflow(self.cfg)
        self.assertAlmostEqual(report["predicted_m"], 2.51, delta=1e-12)
        self.assertAlmostEqual(report["omega"] ** 2, report["zeta_gamma_plus_1"])
        self.assertNotIn("regime", report)

    def test_threshold(self):
        self.cfg.predict.gamma = 3.0
        report = run_workflow(self.cfg)
        self.assertAlmostEqual(report["d_th"], 0.019776, delta=1e-5)

    def test_regimes(self):
        critical = critical_threshold(2.34, 1).d_th
        for d_th, regime in [
            (critical, "critical"),
            (critical + 0.01, "subcritical"),
            (critical - 0.01, "supercritical"),
        ]:
            self.cfg.predict.d_th = d_th
            self.assertEqual(run_workflow(self.cfg)["regime"], regime)

    def test_domain(self):
        self.cfg.predict.gamma = 0.5
        with self.assertRaises(DomainError):
            run_workflow(self.cfg)


class TestHelpers(unittest.TestCase):
    def test_classify(self):
        self.assertEqual(classify(1.0005), "critical")
        self.assertEqual(classify(1.2), "supercritical")
        self.assertEqual(classify(0.8), "subcritical")

    def test_merge_replicas(self):
        first = {"n_avalanches": 3, "fitted_m": 2.0, "returns_excess_kurtosis": 1.0}
        second = {"n_avalanches": 4, "fitted_m": 3.0, "returns_excess_kurtosis": 3.0}
        merged = merge_replicas(
            [dict(first, measured_gamma="n/a"), dict(second, measured_gamma="n/a")]
        )
        self.assertEqual(merged["n_avalanches"], 7)
        self.assertEqual(merged["fitted_m_mean"], 2.5)
        self.assertEqual(merged["fitted_m_std"], 0.5)
        self.assertNotIn("measured_gamma_mean", merged)


if __name__ == "__main__":
    unittest.main()
