"""Directed trade multigraph with degree bookkeeping and preferential sampling."""

import enum
import re
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from critnet.errors import ConfigurationError, SelfLoopError

from .sampling import SumTree

Edge = Tuple[int, int]

_HEADER = re.compile(r"#\s*agents=(\d+)\s+edges=(\d+)\s+step=(-?\d+)")

# integer resolution of the preferential weights
WEIGHT_SCALE = 1000


class Direction(str, enum.Enum):
    """Which degree a quantity refers to."""

    IN = "in"
    OUT = "out"


@dataclass(frozen=True)
class DegreeHistogram:
    """Degree -> number of agents, for one direction."""

    direction: Direction
    degrees: np.ndarray
    counts: np.ndarray

    @property
    def n_agents(self) -> int:
        return int(self.counts.sum())

    def ccdf(self) -> Tuple[np.ndarray, np.ndarray]:
        """Empirical P(k* >= k) over the observed degrees."""
        below = np.concatenate([[0], np.cumsum(self.counts)[:-1]])
        return self.degrees, 1.0 - below / self.n_agents


class TradeGraph:
    """Directed multigraph of a fixed population of agents.

    Parallel edges are stored as multiplicities in per-agent adjacency dicts, so that
    removing all in-edges of an agent costs O(k_in) and reports the affected sources
    with their multiplicity. Two sum trees over (degree + attractiveness) weights serve
    the preferential attachment draws; the default attractiveness of 1 gives the
    (degree + 1) preference.
    """

    def __init__(self, n_agents: int, attractiveness: float = 1.0):
        if n_agents < 2:
            raise ConfigurationError(
                f"A trade graph needs at least two agents, got n_agents={n_agents}."
            )
        if not attractiveness > 0:
            raise ConfigurationError(
                f"attractiveness={attractiveness} must be positive."
            )
        self.n_agents = int(n_agents)
        self.attractiveness = float(attractiveness)
        self._offset = max(1, round(WEIGHT_SCALE * self.attractiveness))
        self._out: List[Dict[int, int]] = [{} for _ in range(self.n_agents)]
        self._in: List[Dict[int, int]] = [{} for _ in range(self.n_agents)]
        self._k_out = [0] * self.n_agents
        self._k_in = [0] * self.n_agents
        self._n_edges = 0
        self._trees = {
            Direction.OUT: SumTree([self._offset] * self.n_agents),
            Direction.IN: SumTree([self._offset] * self.n_agents),
        }

    @property
    def n_edges(self) -> int:
        return self._n_edges

    def k_out(self, agent: int) -> int:
        return self._k_out[agent]

    def k_in(self, agent: int) -> int:
        return self._k_in[agent]

    @property
    def out_degrees(self) -> np.ndarray:
        return np.array(self._k_out, dtype=np.int64)

    @property
    def in_degrees(self) -> np.ndarray:
        return np.array(self._k_in, dtype=np.int64)

    def degrees(self, direction: Direction) -> np.ndarray:
        direction = Direction(direction)
        return self.in_degrees if direction == Direction.IN else self.out_degrees

    def preference_weight(self, degree):
        """Integer sum-tree weight of an agent with `degree`, scalar or array."""
        return WEIGHT_SCALE * degree + self._offset

    def in_sources(self, target: int) -> Dict[int, int]:
        """Sources of `target` with multiplicities (read-only view)."""
        return self._in[target]

    def out_targets(self, source: int) -> Dict[int, int]:
        """Targets of `source` with multiplicities (read-only view)."""
        return self._out[source]

    def add_edge(self, source: int, target: int) -> Edge:
        """Append the edge source -> target and return it."""
        if source == target:
            raise SelfLoopError(f"Self-loop on agent {source} rejected.")
        self._check_agent(source)
        self._check_agent(target)

        self._out[source][target] = self._out[source].get(target, 0) + 1
        self._in[target][source] = self._in[target].get(source, 0) + 1
        self._k_out[source] += 1
        self._k_in[target] += 1
        self._trees[Direction.OUT].add(source, WEIGHT_SCALE)
        self._trees[Direction.IN].add(target, WEIGHT_SCALE)
        self._n_edges += 1
        return source, target

    def remove_in_edges(self, target: int) -> List[Tuple[int, int]]:
        """Remove every edge ending at `target`.

        Returns:
            List of (source, multiplicity) in the order the sources first traded with
            `target`. Empty if `target` has no in-edges.
        """
        self._check_agent(target)
        sources = self._in[target]
        if not sources:
            return []

        removed = list(sources.items())
        out_tree = self._trees[Direction.OUT]
        for source, multiplicity in removed:
            del self._out[source][target]
            self._k_out[source] -= multiplicity
            out_tree.add(source, -WEIGHT_SCALE * multiplicity)

        total = self._k_in[target]
        self._in[target] = {}
        self._k_in[target] = 0
        self._trees[Direction.IN].add(target, -WEIGHT_SCALE * total)
        self._n_edges -= total
        return removed

    def sample_preferential(
        self,
        direction: Direction,
        rng: np.random.Generator,
        exclude: Optional[int] = None,
    ) -> int:
        """Draw an agent with probability proportional to (degree + attractiveness).

        Args:
            direction: Degree used as preference, in or out.
            rng: Seeded numpy generator.
            exclude: Optional agent that is never returned.
        """
        return self._trees[Direction(direction)].sample(rng, exclude=exclude)

    def edges(self) -> Iterator[Edge]:
        """Iterate over the edge multiset, parallel edges repeated."""
        for source, targets in enumerate(self._out):
            for target, multiplicity in targets.items():
                for _ in range(multiplicity):
                    yield source, target

    def edge_arrays(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Distinct ordered pairs as arrays (sources, targets, multiplicities)."""
        pairs = [
            (source, target, multiplicity)
            for source, targets in enumerate(self._out)
            for target, multiplicity in targets.items()
        ]
        if not pairs:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty.copy(), empty.copy()
        arr = np.array(pairs, dtype=np.int64)
        return arr[:, 0], arr[:, 1], arr[:, 2]

    def recount(self) -> Tuple[np.ndarray, np.ndarray]:
        """Out- and in-degrees recomputed from the edge multiset."""
        sources, targets, multiplicity = self.edge_arrays()
        k_out = np.bincount(sources, weights=multiplicity, minlength=self.n_agents)
        k_in = np.bincount(targets, weights=multiplicity, minlength=self.n_agents)
        return k_out.astype(np.int64), k_in.astype(np.int64)

    def check_consistency(self) -> None:
        """Assert the degree conservation laws."""
        k_out, k_in = self.recount()
        assert (k_out == self.out_degrees).all(), "Out-degree counters drifted."
        assert (k_in == self.in_degrees).all(), "In-degree counters drifted."
        assert k_out.sum() == k_in.sum() == self._n_edges, "Degree sums differ."
        for direction, degrees in ((Direction.OUT, k_out), (Direction.IN, k_in)):
            weights = self._trees[direction].weights()
            expected = self.preference_weight(degrees)
            assert (weights == expected).all(), f"{direction.value} weights drifted."
        assert all(agent not in self._out[agent] for agent in range(self.n_agents))

    def degree_histogram(self, direction: Direction) -> DegreeHistogram:
        degrees, counts = np.unique(self.degrees(direction), return_counts=True)
        return DegreeHistogram(Direction(direction), degrees, counts)

    def degree_ccdf(self, direction: Direction) -> Tuple[np.ndarray, np.ndarray]:
        """Cumulative degree distribution P(k* >= k) over the observed degrees."""
        return self.degree_histogram(direction).ccdf()

    def copy(self) -> "TradeGraph":
        graph = TradeGraph(self.n_agents, self.attractiveness)
        for source, targets in enumerate(self._out):
            for target, multiplicity in targets.items():
                for _ in range(multiplicity):
                    graph.add_edge(source, target)
        return graph

    def write_edgelist(self, path: str, step: int = 0) -> None:
        """Write one `source,target` line per edge below a `# agents= ...` header."""
        with open(path, "w", newline="\n") as f:
            f.write(f"# agents={self.n_agents} edges={self._n_edges} step={step}\n")
            for source, target in self.edges():
                f.write(f"{source},{target}\n")

    @classmethod
    def read_edgelist(
        cls, path: str, attractiveness: float = 1.0
    ) -> Tuple["TradeGraph", int]:
        """Load a graph written by `write_edgelist`; returns (graph, step)."""
        with open(path, "r") as f:
            match = _HEADER.match(f.readline().strip())
            assert match is not None, f"Missing edge-list header in {path}."
            n_agents, n_edges, step = (int(g) for g in match.groups())
            graph = cls(n_agents, attractiveness)
            for line in f:
                if line.strip():
                    source, target = line.split(",")
                    graph.add_edge(int(source), int(target))
        assert graph.n_edges == n_edges, "Header edge count does not match the body."
        return graph, step

    def _check_agent(self, agent: int) -> None:
        if not 0 <= agent < self.n_agents:
            raise IndexError(f"Agent {agent} outside [0, {self.n_agents}).")


def new_graph(n_agents: int) -> TradeGraph:
    """Empty trade graph with `n_agents` agents."""
    return TradeGraph(n_agents)
