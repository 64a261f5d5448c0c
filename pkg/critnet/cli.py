"""Command line of critnet.

Flags override the values of an optional YAML config, which override the defaults::

    critnet simulate --agents 2000 --d-th auto --steps 100000 --out outputs/economy
    critnet analyze --input djia.csv --xmin auto --method mle --out outputs/djia
    critnet predict --gamma 2.34 --k0 1 --d-th 0.05
"""

import argparse
import sys
from typing import List, Optional, Union

from omegaconf import DictConfig, OmegaConf

from critnet.data import RunManifest
from critnet.defaults import (
    AGGREGATORS,
    FIT_METHODS,
    SOLVENCY_RULES,
    check_cfg,
    defaults,
)
from critnet.errors import CritnetError, InsufficientDataError

DEFAULTS_SENTINEL = "CRITNET_DEFAULTS"


def check_subset(superset, subset, full_key=""):
    """Check that the keys of 'subset' are a subset of 'superset'."""
    for k, v in subset.items():
        key = full_key + k
        if isinstance(v, (dict, DictConfig)):
            assert k in superset, f"Unknown config section: '{key}'"
            check_subset(superset[k], v, key + ".")
        else:
            msg = f"cli_args must be a subset of the defaults. Wrong cli key: '{key}'"
            assert k in superset, msg


def load_embedded_configs(
    config_path: Optional[str], cli_args: DictConfig
) -> DictConfig:
    """Load the 'extends' chain of a config and merge the cli overwrites on top.

    The chain ends at the defaults, which always form the bottom layer.
    """
    cfgs = [OmegaConf.load(config_path)] if config_path is not None else []
    while cfgs and "extends" in cfgs[0]:
        extends_path = cfgs[0]["extends"]
        del cfgs[0]["extends"]

        # go to parent configs until the defaults are reached
        if extends_path == DEFAULTS_SENTINEL:
            break
        cfgs = [OmegaConf.load(extends_path)] + cfgs

    cfgs = [defaults] + cfgs
    for cfg in cfgs[1:] + [cli_args]:
        check_subset(defaults, cfg)

    # merge all embedded configs and give highest priority to cli_args
    return OmegaConf.merge(*cfgs, cli_args)


def _float_or_auto(value: str) -> Union[float, str]:
    return value if value == "auto" else float(value)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", default=None, help="YAML config file.")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Dotted config override, e.g. sim.n_degree_snapshots=8.",
    )


def _flag(parser, name, key, **kwargs):
    parser.add_argument(name, dest=key, default=argparse.SUPPRESS, **kwargs)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="critnet",
        description="Self-organized critical trade networks and market drawdowns.",
    )
    sub = parser.add_subparsers(dest="mode", required=True)

    sim = sub.add_parser("simulate", help="Run the trade economy.")
    _add_common(sim)
    _flag(sim, "--agents", "sim.n_agents", type=int)
    _flag(sim, "--k-out", "sim.k_out_init", type=int)
    _flag(sim, "--gamma", "sim.gamma_target", type=float)
    _flag(sim, "--attractiveness", "sim.attractiveness", type=_float_or_auto)
    _flag(sim, "--d-th", "sim.d_th", type=_float_or_auto)
    _flag(sim, "--steps", "sim.n_steps", type=int)
    _flag(sim, "--stride", "sim.sample_stride", type=int)
    _flag(sim, "--seed", "seed", type=int)
    _flag(sim, "--aggregator", "sim.index_aggregator", choices=AGGREGATORS)
    _flag(sim, "--solvency-rule", "sim.solvency_rule", choices=SOLVENCY_RULES)
    _flag(sim, "--settle", "sim.settle_initial", action="store_true")
    _flag(sim, "--snapshots", "sim.n_degree_snapshots", type=int)
    _flag(sim, "--replicas", "sim.replicas", type=int)
    _flag(sim, "--log-steps", "logging.log_steps", type=int)
    _flag(sim, "--wandb", "logging.wandb", action="store_true")
    _flag(sim, "--out", "logging.out_dir")
    sim.add_argument("--manifest", default=None, help="Re-run from a manifest.txt.")

    ana = sub.add_parser("analyze", help="Fit drawdown avalanches of an index CSV.")
    _add_common(ana)
    _flag(ana, "--input", "analyze.input")
    _flag(ana, "--name", "analyze.name")
    _flag(ana, "--date-col", "analyze.date_col")
    _flag(ana, "--close-col", "analyze.close_col")
    _flag(ana, "--xmin", "analyze.xmin", type=_float_or_auto)
    _flag(ana, "--method", "analyze.method", choices=FIT_METHODS)
    _flag(ana, "--size-mode", "analyze.size_mode", choices=["magnitude", "length"])
    _flag(ana, "--min-events", "analyze.min_events", type=int)
    _flag(ana, "--bins", "analyze.bins", type=int)
    _flag(ana, "--out", "logging.out_dir")

    pre = sub.add_parser("predict", help="Critical threshold and exponent for gamma.")
    _add_common(pre)
    _flag(pre, "--gamma", "predict.gamma", type=float)
    _flag(pre, "--k0", "predict.k0", type=int)
    _flag(pre, "--d-th", "predict.d_th", type=float)
    _flag(pre, "--k-max", "predict.k_max", type=int)
    return parser


def parse_cfg(argv: Optional[List[str]] = None) -> DictConfig:
    """Merged config of defaults, config file, manifest and flags."""
    args = vars(build_parser().parse_args(argv))
    config_path = args.pop("config")
    overrides = args.pop("overrides")
    manifest_path = args.pop("manifest", None)

    cli_args = OmegaConf.create({"mode": args.pop("mode")})
    if manifest_path is not None:
        manifest = RunManifest.read(manifest_path)
        cli_args = OmegaConf.merge(
            OmegaConf.from_dotlist(manifest.dotlist(exclude={"config", "mode"})),
            cli_args,
        )
        cli_args.seed = manifest.seed
    for key, value in args.items():
        OmegaConf.update(cli_args, key, value, force_add=True)
    cli_args = OmegaConf.merge(cli_args, OmegaConf.from_dotlist(overrides))

    cfg = load_embedded_configs(config_path, cli_args)
    cfg.config = config_path
    return cfg


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point; returns the process exit code."""
    try:
        cfg = parse_cfg(argv)
        check_cfg(cfg)
    except AssertionError as e:
        print(f"invalid configuration: {e}", file=sys.stderr)
        return 2

    print("#" * 79, f"\nStarting a critnet {cfg.mode} run with the following configs:")
    print(OmegaConf.to_yaml(cfg))
    print("#" * 79)

    from critnet.runner import run_workflow

    try:
        run_workflow(cfg)
    except InsufficientDataError as e:
        print(f"insufficient data: {e}", file=sys.stderr)
        return e.exit_code
    except CritnetError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
