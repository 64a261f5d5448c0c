"""Event-time loop of the trade economy."""

import math
from dataclasses import dataclass, field, fields
from functools import cached_property
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from omegaconf import DictConfig, OmegaConf

from critnet.analytics.criticality import critical_threshold
from critnet.defaults import AGGREGATORS, SOLVENCY_RULES, defaults
from critnet.errors import ConfigurationError
from critnet.graph import Direction, SumTree, TradeGraph

from .avalanche import AvalancheRecord, cascade, settle
from .pricing import (
    edge_energies,
    get_solvency_rule,
    mean_alpha,
    mean_field_energies,
    solvency_mask,
)


@dataclass(frozen=True)
class SimConfig:
    """Full parameterization of one simulation.

    Attributes:
        n_agents: Number of agents N.
        k_out_init: Initial outgoing connections per agent.
        gamma_target: Expected degree exponent, used when d_th or attractiveness is
            "auto".
        attractiveness: Offset a of the (degree + a) preference, or "auto" for
            k_out_init (gamma_target - 2), which grows in-degrees with exponent
            gamma_target.
        d_th: Collapse threshold in [0, 1), or "auto" for the critical value.
        n_steps: Number of event-times.
        sample_stride: Event-times per index sample.
        seed: Seed of the numpy generator.
        index_aggregator: "assets", "absolute" or "net".
        solvency_rule: "surplus" or "debt".
        settle_initial: Cascade every insolvent agent of the initial graph first.
        n_degree_snapshots: Number of evenly spaced in-degree snapshots.
        check_invariants: Assert conservation and solvency during the run.
    """

    n_agents: int = 2000
    k_out_init: int = 1
    gamma_target: float = 2.34
    attractiveness: Union[float, str] = "auto"
    d_th: Union[float, str] = "auto"
    n_steps: int = 100_000
    sample_stride: int = 5
    seed: int = 0
    index_aggregator: str = "assets"
    solvency_rule: str = "surplus"
    settle_initial: bool = False
    n_degree_snapshots: int = 4
    check_invariants: bool = True

    def __post_init__(self):
        if self.n_agents < 2:
            raise ConfigurationError(f"n_agents={self.n_agents} must be >= 2.")
        if not 1 <= self.k_out_init < self.n_agents:
            raise ConfigurationError(
                f"k_out_init={self.k_out_init} must be in [1, n_agents)."
            )
        if self.n_steps < 0:
            raise ConfigurationError(f"n_steps={self.n_steps} must be >= 0.")
        if self.sample_stride < 1:
            raise ConfigurationError(
                f"sample_stride={self.sample_stride} must be >= 1."
            )
        if self.n_degree_snapshots < 0:
            raise ConfigurationError("n_degree_snapshots must be >= 0.")
        if self.index_aggregator not in AGGREGATORS:
            raise ConfigurationError(
                f"Unknown aggregator '{self.index_aggregator}', expected {AGGREGATORS}."
            )
        if self.solvency_rule not in SOLVENCY_RULES:
            raise ConfigurationError(
                f"Unknown solvency rule '{self.solvency_rule}', "
                f"expected {SOLVENCY_RULES}."
            )
        if isinstance(self.attractiveness, str):
            if self.attractiveness != "auto":
                raise ConfigurationError(
                    f"attractiveness='{self.attractiveness}' is neither a number "
                    "nor 'auto'."
                )
            if self.gamma_target <= 2:
                raise ConfigurationError(
                    f"attractiveness 'auto' needs gamma_target > 2, "
                    f"got {self.gamma_target}."
                )
        else:
            object.__setattr__(self, "attractiveness", float(self.attractiveness))
            if not self.attractiveness > 0:
                raise ConfigurationError(
                    f"attractiveness={self.attractiveness} must be positive."
                )
        if isinstance(self.d_th, str):
            if self.d_th != "auto":
                raise ConfigurationError(
                    f"d_th='{self.d_th}' is neither a number nor 'auto'."
                )
        else:
            object.__setattr__(self, "d_th", float(self.d_th))
            if not 0.0 <= self.d_th < 1.0:
                raise ConfigurationError(f"d_th={self.d_th} outside [0, 1).")

    @classmethod
    def from_cfg(
        cls, cfg: Union[Dict, DictConfig], seed: Optional[int] = None
    ) -> "SimConfig":
        """Build from a (partial) `sim` config section merged over the defaults."""
        if not isinstance(cfg, DictConfig):
            cfg = OmegaConf.create(dict(cfg))
        merged = OmegaConf.merge(defaults.sim, cfg)
        kwargs = {f.name: merged[f.name] for f in fields(cls) if f.name in merged}
        if seed is not None:
            kwargs["seed"] = int(seed)
        return cls(**kwargs)

    @cached_property
    def threshold(self) -> float:
        """Numeric d_th, solved from gamma_target and k_out_init when "auto"."""
        if self.d_th == "auto":
            return critical_threshold(self.gamma_target, self.k_out_init).d_th
        return float(self.d_th)

    @cached_property
    def offset(self) -> float:
        """Numeric attractiveness, k_out_init (gamma_target - 2) when "auto"."""
        if self.attractiveness == "auto":
            return self.k_out_init * (self.gamma_target - 2.0)
        return float(self.attractiveness)

    def to_dict(self) -> Dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class DegreeSnapshot:
    """In-degree of every agent after event-time `step`."""

    step: int
    in_degrees: np.ndarray


@dataclass(frozen=True)
class SimResult:
    """Immutable outcome of `run`.

    Attributes:
        config: Configuration of the run.
        d_th: Threshold actually used.
        steps: Event-times of the index samples.
        index_values: U_t per sample.
        measured_alpha: Mean price per sample, NaN when the graph has no edges.
        avalanches: Avalanche records sorted by trigger step.
        final_graph: Graph after the last event-time.
        degree_snapshots: Evenly spaced in-degree snapshots.
        settle_avalanches: Cascades run on the initial graph when settling.
    """

    config: SimConfig
    d_th: float
    steps: np.ndarray
    index_values: np.ndarray
    measured_alpha: np.ndarray
    avalanches: Tuple[AvalancheRecord, ...]
    final_graph: TradeGraph
    degree_snapshots: Tuple[DegreeSnapshot, ...] = field(default_factory=tuple)
    settle_avalanches: Tuple[AvalancheRecord, ...] = field(default_factory=tuple)

    @property
    def index_series(self) -> List[Tuple[int, float]]:
        return list(zip(self.steps.tolist(), self.index_values.tolist()))

    @property
    def avalanche_sizes(self) -> np.ndarray:
        return np.array([a.size_s for a in self.avalanches], dtype=np.int64)


def as_sim_config(config: Union[SimConfig, Dict, DictConfig]) -> SimConfig:
    if isinstance(config, SimConfig):
        return config
    return SimConfig.from_cfg(config)


def build_initial(config: SimConfig, rng: np.random.Generator) -> TradeGraph:
    """Graph in which every agent has out-degree exactly `k_out_init`.

    Agents arrive in a random permutation. Each arriving agent attaches its
    `k_out_init` edges one at a time to agents that arrived before it, drawn by
    (in-degree + attractiveness) preference, which grows in-degrees with exponent
    2 + attractiveness / k_out_init. The first agent has nobody to trade with on
    arrival and places its edges last, over the whole population.
    """
    graph = TradeGraph(config.n_agents, config.offset)
    first, *rest = rng.permutation(config.n_agents).tolist()
    # preference restricted to agents that already arrived
    arrived = SumTree([0] * config.n_agents)
    arrived.update(first, graph.preference_weight(0))
    for agent in rest:
        for _ in range(config.k_out_init):
            target = arrived.sample(rng)
            graph.add_edge(agent, target)
            arrived.update(target, graph.preference_weight(graph.k_in(target)))
        arrived.update(agent, graph.preference_weight(graph.k_in(agent)))

    for _ in range(config.k_out_init):
        target = graph.sample_preferential(Direction.IN, rng, exclude=first)
        graph.add_edge(first, target)
    return graph


def apply_trade(
    graph: TradeGraph,
    source: int,
    target: int,
    d_th: float,
    solvency_rule: str = "surplus",
    event_time: int = 0,
    check_invariants: bool = False,
) -> Optional[AvalancheRecord]:
    """Add the trade source -> target; cascade if it made the target insolvent.

    Only a solvent target can be triggered: an agent that was already insolvent
    absorbs the extra liability. The source is never rechecked, since a new out-edge
    never worsens it.
    """
    is_solvent = get_solvency_rule(solvency_rule)
    was_solvent = is_solvent(graph.k_out(target), graph.k_in(target), d_th)
    graph.add_edge(source, target)
    if not was_solvent or is_solvent(graph.k_out(target), graph.k_in(target), d_th):
        return None

    record, touched = cascade(graph, target, d_th, is_solvent, event_time)
    if check_invariants:
        assert record.size_s >= 1
        assert record.node_count_r >= record.size_s
        assert record.edges_removed >= record.size_s
        newly_insolvent = [
            agent
            for agent, solvent_before in touched.items()
            if solvent_before
            and not is_solvent(graph.k_out(agent), graph.k_in(agent), d_th)
        ]
        assert not newly_insolvent, (
            f"Agents {newly_insolvent} turned insolvent during the cascade."
        )
    return record


def step(
    graph: TradeGraph,
    config: SimConfig,
    rng: np.random.Generator,
    event_time: int = 0,
) -> Optional[AvalancheRecord]:
    """One event-time: a new preferential trade, then a possible cascade."""
    source = graph.sample_preferential(Direction.OUT, rng)
    target = graph.sample_preferential(Direction.IN, rng)
    while target == source:
        target = graph.sample_preferential(Direction.IN, rng)
    return apply_trade(
        graph,
        source,
        target,
        config.threshold,
        config.solvency_rule,
        event_time,
        config.check_invariants,
    )


def index_value(graph: TradeGraph, aggregator: str = "assets") -> float:
    """Index U_t from the per-edge internal energies.

    "assets" sums the positive energies, "absolute" is half the summed magnitudes and
    "net" the plain sum, which vanishes up to rounding.
    """
    if graph.n_edges == 0:
        return 0.0
    energies = edge_energies(graph)
    if aggregator == "assets":
        return float(np.maximum(energies, 0.0).sum())
    if aggregator == "absolute":
        return float(0.5 * np.abs(energies).sum())
    if aggregator == "net":
        return float(energies.sum())
    raise ConfigurationError(f"Unknown aggregator '{aggregator}'.")


def snapshot_steps(n_steps: int, n_snapshots: int) -> List[int]:
    """Event-times n_steps * j / n_snapshots, j = 1..n_snapshots, rounded down."""
    return sorted({n_steps * j // n_snapshots for j in range(1, n_snapshots + 1)})


def run(
    config: Union[SimConfig, Dict, DictConfig], log_steps: Optional[int] = None
) -> SimResult:
    """Build the initial graph and advance it `n_steps` event-times.

    Args:
        config: SimConfig, or a (partial) `sim` config merged over the defaults.
        log_steps: Event-times between progress prints, None for silence.
    """
    config = as_sim_config(config)
    d_th = config.threshold
    rng = np.random.default_rng(config.seed)

    graph = build_initial(config, rng)
    settled: List[AvalancheRecord] = []
    if config.settle_initial:
        settled = settle(graph, d_th, config.solvency_rule)

    snapshots_at = snapshot_steps(config.n_steps, config.n_degree_snapshots)
    snapshots = []
    if snapshots_at and snapshots_at[0] == 0:
        snapshots.append(DegreeSnapshot(0, graph.in_degrees))

    # insolvency is never created, only absorbed or resolved by a collapse
    solvent = solvency_mask(graph, d_th, config.solvency_rule)
    if config.check_invariants and config.settle_initial:
        assert solvent.all(), "Insolvent agents left after settling."

    steps, values, alphas = [], [], []
    avalanches: List[AvalancheRecord] = []
    for n in range(1, config.n_steps + 1):
        record = step(graph, config, rng, event_time=n)
        if record is not None:
            avalanches.append(record)

        if n % config.sample_stride == 0:
            alpha = mean_alpha(graph) if graph.n_edges > 0 else math.nan
            if config.check_invariants and graph.n_edges > 0:
                total = mean_field_energies(graph, alpha).sum()
                assert abs(total) < 1e-9 * max(graph.n_edges, 1), (
                    f"Mean-field energies sum to {total} at step {n}."
                )
            if config.check_invariants:
                now_solvent = solvency_mask(graph, d_th, config.solvency_rule)
                turned = np.flatnonzero(solvent & ~now_solvent)
                assert turned.size == 0, (
                    f"Agents {turned.tolist()} turned insolvent before step {n}."
                )
                solvent = now_solvent
            steps.append(n)
            values.append(index_value(graph, config.index_aggregator))
            alphas.append(alpha)

        if snapshots_at and n in snapshots_at:
            snapshots.append(DegreeSnapshot(n, graph.in_degrees))

        if log_steps and n % log_steps == 0:
            last = values[-1] if values else math.nan
            print(
                f"{n:>8}/{config.n_steps}, edges: {graph.n_edges}, "
                f"avalanches: {len(avalanches)}, U_t: {last:.5g}"
            )

    if config.check_invariants:
        graph.check_consistency()

    return SimResult(
        config=config,
        d_th=d_th,
        steps=_frozen(np.array(steps, dtype=np.int64)),
        index_values=_frozen(np.array(values, dtype=np.float64)),
        measured_alpha=_frozen(np.array(alphas, dtype=np.float64)),
        avalanches=tuple(avalanches),
        final_graph=graph,
        degree_snapshots=tuple(snapshots),
        settle_avalanches=tuple(settled),
    )


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr
