"""Collapse cascades."""

from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Tuple

from critnet.errors import NotTriggeredError
from critnet.graph import TradeGraph

from .pricing import SolvencyFn, get_solvency_rule


@dataclass(frozen=True)
class AvalancheRecord:
    """Outcome of one cascade.

    Attributes:
        trigger_step: Event-time of the trade that triggered the cascade.
        size_s: Number of agents that collapsed.
        node_count_r: Number of distinct agents touched: the trigger and every source
            of a removed edge, collapsing or not.
        edges_removed: Number of edges removed, parallel edges counted.
    """

    trigger_step: int
    size_s: int
    node_count_r: int
    edges_removed: int


def cascade(
    graph: TradeGraph,
    trigger: int,
    d_th: float,
    is_solvent: SolvencyFn,
    trigger_step: int = 0,
) -> Tuple[AvalancheRecord, Dict[int, bool]]:
    """Breadth-first cascade from an insolvent `trigger`.

    A collapsing agent loses all its in-edges. Every source of a removed edge loses one
    out-connection per edge. The source collapses in turn only when that loss carries it
    from solvent to insolvent; an agent that was already insolvent absorbs the loss. A
    collapsed agent keeps k_in = 0, which is solvent under both rules, so it never
    collapses twice.

    Returns:
        The avalanche record and, for every touched agent, whether it was solvent just
        before the cascade first reached it. The trigger maps to True.
    """
    queue = deque([trigger])
    touched: Dict[int, bool] = {trigger: True}
    size = edges_removed = 0

    while queue:
        agent = queue.popleft()
        size += 1
        for source, multiplicity in graph.remove_in_edges(agent):
            edges_removed += multiplicity
            k_out, k_in = graph.k_out(source), graph.k_in(source)
            was_solvent = is_solvent(k_out + multiplicity, k_in, d_th)
            touched.setdefault(source, was_solvent)
            if was_solvent and not is_solvent(k_out, k_in, d_th):
                queue.append(source)

    record = AvalancheRecord(
        trigger_step=trigger_step,
        size_s=size,
        node_count_r=len(touched),
        edges_removed=edges_removed,
    )
    return record, touched


def propagate_avalanche(
    graph: TradeGraph,
    trigger: int,
    d_th: float,
    solvency_rule: str = "surplus",
    trigger_step: int = 0,
) -> AvalancheRecord:
    """Run the collapse cascade started by the insolvent agent `trigger`.

    Every touched agent that was solvent when the cascade reached it is solvent on
    return; agents that were insolvent already may stay so.

    Args:
        graph: Trade graph, modified in place.
        trigger: Agent that just became insolvent.
        d_th: Collapse threshold in [0, 1).
        solvency_rule: "surplus" or "debt".
        trigger_step: Event-time stored in the record.
    """
    is_solvent = get_solvency_rule(solvency_rule)
    if is_solvent(graph.k_out(trigger), graph.k_in(trigger), d_th):
        raise NotTriggeredError(f"Agent {trigger} is solvent, nothing to propagate.")
    record, _ = cascade(graph, trigger, d_th, is_solvent, trigger_step)
    return record


def settle(
    graph: TradeGraph, d_th: float, solvency_rule: str = "surplus"
) -> List[AvalancheRecord]:
    """Cascade every insolvent agent in index order until all agents are solvent.

    Under the surplus rule a graph with edges always holds an insolvent agent, since
    surplus sums to zero over the population, so settling it removes every edge.
    """
    is_solvent = get_solvency_rule(solvency_rule)
    records = []
    for agent in range(graph.n_agents):
        if not is_solvent(graph.k_out(agent), graph.k_in(agent), d_th):
            record, _ = cascade(graph, agent, d_th, is_solvent)
            records.append(record)
    return records
