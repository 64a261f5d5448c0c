from .analytics import critical_threshold, expected_offspring, otter_check, zeta
from .economy import SimConfig, SimResult, propagate_avalanche, run
from .graph import Direction, TradeGraph
from .stats import extract_drawdowns, fit_power_law, log_returns, summarize

__all__ = [
    "TradeGraph",
    "Direction",
    "SimConfig",
    "SimResult",
    "run",
    "propagate_avalanche",
    "zeta",
    "critical_threshold",
    "expected_offspring",
    "otter_check",
    "log_returns",
    "extract_drawdowns",
    "fit_power_law",
    "summarize",
]

__version__ = "0.1.0"
