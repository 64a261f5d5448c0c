"""Default critnet configs."""


from omegaconf import DictConfig, OmegaConf

AGGREGATORS = ["assets", "absolute", "net"]
SOLVENCY_RULES = ["surplus", "debt"]
FIT_METHODS = ["ccdf", "mle"]


def set_defaults(cfg: DictConfig = OmegaConf.create({})) -> DictConfig:
    """Set default critnet configs."""

    ### global configs

    # configuration file, optional. Flags override its values.
    cfg.config = None
    # One of "simulate", "analyze" or "predict"
    cfg.mode = "simulate"
    # random seed of the simulation
    cfg.seed = 0

    ### economy simulation
    cfg.sim = OmegaConf.create({})

    # number of agents N, constant during the run
    cfg.sim.n_agents = 2000
    # initial outgoing connections per agent, K0
    cfg.sim.k_out_init = 1
    # expected degree exponent, used to solve d_th when d_th is "auto"
    cfg.sim.gamma_target = 2.34
    # offset a of the (degree + a) preference, "auto" for k_out_init (gamma_target - 2)
    cfg.sim.attractiveness = "auto"
    # collapse threshold in [0, 1), or "auto" for the critical value
    cfg.sim.d_th = "auto"
    # number of event-times, one new connection each
    cfg.sim.n_steps = 100_000
    # event-times per recorded index sample
    cfg.sim.sample_stride = 5
    # index U_t. One of "assets", "absolute" or "net"
    cfg.sim.index_aggregator = "assets"
    # collapse predicate. "surplus" (k_out > omega k_in) or "debt" (k_in < omega k_out)
    cfg.sim.solvency_rule = "surplus"
    # cascade every insolvent agent of the initial graph before the first step. Under
    # the surplus rule this empties the graph
    cfg.sim.settle_initial = False
    # number of evenly spaced in-degree snapshots
    cfg.sim.n_degree_snapshots = 4
    # assert conservation and solvency invariants during the run
    cfg.sim.check_invariants = True
    # number of seed-shifted replicas run in parallel
    cfg.sim.replicas = 1

    ### power-law fit of simulated avalanche sizes
    cfg.fit = OmegaConf.create({})

    # fit method. One of "ccdf" or "mle"
    cfg.fit.method = "ccdf"
    # lower cutoff; avalanche sizes are clean from s=1
    cfg.fit.xmin = 1

    ### empirical index analysis
    cfg.analyze = OmegaConf.create({})

    # path to the index CSV
    cfg.analyze.input = None
    # dataset label, defaults to the file name
    cfg.analyze.name = None
    # date column name
    cfg.analyze.date_col = "Date"
    # closing level column name
    cfg.analyze.close_col = "Close"
    # lower cutoff of the fit, "auto" for KS minimization
    cfg.analyze.xmin = "auto"
    # fit method. One of "ccdf" or "mle"
    cfg.analyze.method = "mle"
    # drawdown size. "magnitude" (summed |log return|) or "length" (run length)
    cfg.analyze.size_mode = "magnitude"
    # minimum number of usable levels
    cfg.analyze.min_length = 30
    # minimum number of drawdown events
    cfg.analyze.min_events = 30
    # histogram bins of the return PDF, None for Freedman-Diaconis
    cfg.analyze.bins = None

    ### critical-state prediction
    cfg.predict = OmegaConf.create({})

    # degree exponent gamma
    cfg.predict.gamma = None
    # initial outgoing connections K0
    cfg.predict.k0 = 1
    # optional threshold to classify
    cfg.predict.d_th = None
    # truncation of the offspring sums, None to derive it from the tail bound
    cfg.predict.k_max = None

    ### logging
    cfg.logging = OmegaConf.create({})

    # output directory
    cfg.logging.out_dir = "outputs"
    # name of the run, defaults to mode and timestamp
    cfg.logging.run_name = None
    # number of event-times between progress prints
    cfg.logging.log_steps = 10_000
    # wandb enable
    cfg.logging.wandb = False
    # wandb project name
    cfg.logging.wandb_project = None
    # wandb entity name
    cfg.logging.wandb_entity = None

    return cfg


defaults = set_defaults()


def check_cfg(cfg: DictConfig):
    """Check if the configs are valid."""

    assert cfg.mode in ["simulate", "analyze", "predict"]

    sim = cfg.sim
    assert sim.n_agents >= 2, "At least two agents are needed to trade."
    assert sim.k_out_init >= 1, "k_out_init must be >= 1."
    assert sim.k_out_init < sim.n_agents, "k_out_init must be < n_agents."
    assert sim.gamma_target > 0, "gamma_target must be positive."
    if sim.attractiveness == "auto":
        assert sim.gamma_target > 2, "attractiveness 'auto' needs gamma_target > 2."
    else:
        assert float(sim.attractiveness) > 0, "attractiveness must be positive."
    if sim.d_th != "auto":
        assert 0 <= float(sim.d_th) < 1, "d_th must be in [0, 1) or 'auto'."
    assert sim.n_steps >= 0, "n_steps must be non-negative."
    assert sim.sample_stride >= 1, "sample_stride must be >= 1."
    assert sim.index_aggregator in AGGREGATORS
    assert sim.solvency_rule in SOLVENCY_RULES
    assert sim.n_degree_snapshots >= 0
    assert sim.replicas >= 1, "replicas must be >= 1."

    assert cfg.fit.method in FIT_METHODS
    assert cfg.analyze.method in FIT_METHODS
    assert cfg.analyze.size_mode in ["magnitude", "length"]
    if cfg.analyze.xmin != "auto":
        assert float(cfg.analyze.xmin) > 0, "xmin must be positive or 'auto'."

    if cfg.mode == "analyze":
        assert cfg.analyze.input is not None, "analyze.input must be specified."
    if cfg.mode == "predict":
        assert cfg.predict.gamma is not None, "predict.gamma must be specified."
        assert cfg.predict.k0 >= 1, "k0 must be >= 1."
