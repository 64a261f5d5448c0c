from .avalanche import AvalancheRecord, cascade, propagate_avalanche, settle
from .pricing import (
    AgentState,
    agent_state,
    edge_energies,
    edge_prices,
    get_solvency_rule,
    internal_energy,
    mean_alpha,
    mean_field_energies,
    price,
    solvency_mask,
    solvent,
    solvent_debt_limit,
)
from .simulation import (
    DegreeSnapshot,
    SimConfig,
    SimResult,
    apply_trade,
    build_initial,
    index_value,
    run,
    step,
)

__all__ = [
    "AvalancheRecord",
    "cascade",
    "propagate_avalanche",
    "settle",
    "AgentState",
    "agent_state",
    "edge_energies",
    "edge_prices",
    "get_solvency_rule",
    "internal_energy",
    "mean_alpha",
    "mean_field_energies",
    "price",
    "solvency_mask",
    "solvent",
    "solvent_debt_limit",
    "DegreeSnapshot",
    "SimConfig",
    "SimResult",
    "apply_trade",
    "build_initial",
    "index_value",
    "run",
    "step",
]
