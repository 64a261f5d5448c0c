import os
import tempfile
import unittest

from omegaconf import OmegaConf

from critnet.cli import check_subset, load_embedded_configs, main, parse_cfg
from critnet.defaults import defaults

CONFIGS = os.path.join(os.path.dirname(os.path.dirname(__file__)), "configs")


class TestParseCfg(unittest.TestCase):
    def test_flags_override_file(self):
        cfg = parse_cfg(
            [
                "simulate",
                "--config",
                os.path.join(CONFIGS, "economy", "base.yaml"),
                "--agents",
                "500",
                "--d-th",
                "0.05",
                "--set",
                "sim.n_degree_snapshots=8",
            ]
        )
        self.assertEqual(cfg.mode, "simulate")
        self.assertEqual(cfg.sim.n_agents, 500)
        self.assertEqual(cfg.sim.d_th, 0.05)
        self.assertEqual(cfg.sim.n_degree_snapshots, 8)
        # untouched values come from the file, then the defaults
        self.assertEqual(cfg.sim.n_steps, 100_000)
        self.assertEqual(cfg.fit.method, "ccdf")
        self.assertTrue(cfg.config.endswith("base.yaml"))

    def test_extends_chain(self):
        config = os.path.join(CONFIGS, "economy", "debt.yaml")
        cfg = parse_cfg(["simulate", "--config", config])
        self.assertEqual(cfg.sim.solvency_rule, "debt")
        # inherited from base.yaml, then the defaults
        self.assertEqual(cfg.sim.n_agents, 2000)
        self.assertEqual(cfg.sim.attractiveness, "auto")
        self.assertFalse(cfg.sim.settle_initial)

    def test_auto_threshold_flag(self):
        cfg = parse_cfg(
            ["simulate", "--d-th", "auto", "--settle", "--attractiveness", "0.5"]
        )
        self.assertEqual(cfg.sim.d_th, "auto")
        self.assertEqual(cfg.sim.attractiveness, 0.5)
        self.assertTrue(cfg.sim.settle_initial)
        self.assertIsNone(cfg.config)

    def test_unknown_key(self):
        with self.assertRaises(AssertionError):
            check_subset(defaults, {"sim": {"n_nodes": 3}})
        with self.assertRaises(AssertionError):
            load_embedded_configs(None, OmegaConf.create({"extra": 1}))


class TestMain(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def test_predict(self):
        self.assertEqual(main(["predict", "--gamma", "2.34", "--k0", "1"]), 0)
        self.assertEqual(main(["predict", "--gamma", "2.34", "--d-th", "0.05"]), 0)

    def test_exit_codes(self):
        self.assertEqual(main(["predict", "--gamma", "0.5"]), 2)
        self.assertEqual(main(["predict"]), 2)
        out = ["--out", self.tmp.name]
        self.assertEqual(main(["simulate", "--agents", "1", *out]), 2)
        missing = os.path.join(self.tmp.name, "missing.csv")
        self.assertEqual(main(["analyze", "--input", missing, *out]), 3)

    def test_manifest_rerun_is_byte_identical(self):
        first = os.path.join(self.tmp.name, "first")
        second = os.path.join(self.tmp.name, "second")
        args = ["--agents", "80", "--steps", "400", "--seed", "7", "--log-steps", "100"]
        self.assertEqual(main(["simulate", *args, "--out", first]), 0)
        manifest = os.path.join(first, "manifest.txt")
        rerun = ["simulate", "--manifest", manifest, "--out", second]
        self.assertEqual(main(rerun), 0)

        for name in ["index_series.csv", "avalanches.csv", "graph_snapshot.txt"]:
            with open(os.path.join(first, name), "rb") as f:
                expected = f.read()
            with open(os.path.join(second, name), "rb") as f:
                self.assertEqual(f.read(), expected, name)


if __name__ == "__main__":
    unittest.main()
