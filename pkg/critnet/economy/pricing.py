"""Labor prices, internal energies and the solvency predicates.

Labor is counted in units of one per connection, so a trade source -> target moves
one unit of labor to the target and alpha units of energy back to the source.
"""

import math
from dataclasses import dataclass
from typing import Callable, Dict, Union

import numpy as np
from scipy.special import expit

from critnet.errors import ConfigurationError, NoEdgesError
from critnet.graph import TradeGraph

SolvencyFn = Callable[[int, int, float], bool]
ArrayLike = Union[float, np.ndarray]


def price(k_out_source: ArrayLike, k_in_target: ArrayLike) -> ArrayLike:
    """Logistic labor price 2 / (1 + exp(-(k_out_source - k_in_target))) in [0, 2]."""
    diff = np.subtract(k_out_source, k_in_target, dtype=np.float64)
    alpha = 2.0 * expit(diff)
    return float(alpha) if np.ndim(alpha) == 0 else alpha


def edge_prices(graph: TradeGraph):
    """(sources, targets, multiplicities, prices) per distinct edge."""
    sources, targets, multiplicity = graph.edge_arrays()
    alpha = price(graph.out_degrees[sources], graph.in_degrees[targets])
    return sources, targets, multiplicity, np.atleast_1d(alpha)


def mean_alpha(graph: TradeGraph) -> float:
    """Mean price over the edge multiset."""
    if graph.n_edges == 0:
        raise NoEdgesError("The mean price is undefined on a graph without edges.")
    _, _, multiplicity, alpha = edge_prices(graph)
    return float(np.dot(alpha, multiplicity) / multiplicity.sum())


@dataclass(frozen=True)
class AgentState:
    """Degrees of one agent and the quantities derived from them."""

    k_out: int
    k_in: int

    @property
    def turnover(self) -> int:
        return self.k_out + self.k_in

    def internal_energy(self, alpha: float) -> float:
        return internal_energy(self, alpha)

    def deficit(self, alpha: float) -> float:
        """Percentual deficit U / T, NaN for an isolated agent."""
        if self.turnover == 0:
            return math.nan
        return self.internal_energy(alpha) / self.turnover


def agent_state(graph: TradeGraph, agent: int) -> AgentState:
    return AgentState(k_out=graph.k_out(agent), k_in=graph.k_in(agent))


def internal_energy(agent: AgentState, alpha: float) -> float:
    """Mean-field internal energy (1 - alpha)(k_out - k_in)."""
    assert 0.0 <= alpha <= 2.0, f"alpha={alpha} outside [0, 2]."
    return (1.0 - alpha) * (agent.k_out - agent.k_in)


def mean_field_energies(graph: TradeGraph, alpha: float) -> np.ndarray:
    """Mean-field internal energy of every agent."""
    return (1.0 - alpha) * (graph.out_degrees - graph.in_degrees)


def edge_energies(graph: TradeGraph) -> np.ndarray:
    """Internal energy of every agent from the individual edge prices.

    Each edge adds (1 - alpha) to its source and (alpha - 1) to its target.
    """
    sources, targets, multiplicity, alpha = edge_prices(graph)
    surplus = (1.0 - alpha) * multiplicity
    n = graph.n_agents
    return np.bincount(sources, weights=surplus, minlength=n) - np.bincount(
        targets, weights=surplus, minlength=n
    )


def solvent(k_out: int, k_in: int, d_th: float) -> bool:
    """Surplus rule: k_out - k_in > d_th (k_out + k_in); isolated agents are solvent."""
    assert 0.0 <= d_th < 1.0, f"d_th={d_th} outside [0, 1)."
    if k_out + k_in == 0:
        return True
    return k_out - k_in > d_th * (k_out + k_in)


def solvent_debt_limit(k_out: int, k_in: int, d_th: float) -> bool:
    """Debt rule: k_in - k_out < d_th (k_out + k_in); isolated agents are solvent."""
    assert 0.0 <= d_th < 1.0, f"d_th={d_th} outside [0, 1)."
    if k_out + k_in == 0:
        return True
    return k_in - k_out < d_th * (k_out + k_in)


SOLVENCY_RULES: Dict[str, SolvencyFn] = {
    "surplus": solvent,
    "debt": solvent_debt_limit,
}


def get_solvency_rule(name: str) -> SolvencyFn:
    if name not in SOLVENCY_RULES:
        raise ConfigurationError(
            f"Unknown solvency rule '{name}', expected one of {list(SOLVENCY_RULES)}."
        )
    return SOLVENCY_RULES[name]


def solvency_mask(graph: TradeGraph, d_th: float, solvency_rule: str) -> np.ndarray:
    """Boolean solvency of every agent, vectorized over the degree arrays."""
    get_solvency_rule(solvency_rule)
    k_out, k_in = graph.out_degrees, graph.in_degrees
    turnover = k_out + k_in
    if solvency_rule == "surplus":
        ok = k_out - k_in > d_th * turnover
    else:
        ok = k_in - k_out < d_th * turnover
    return ok | (turnover == 0)
