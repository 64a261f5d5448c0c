from .fitting import (
    DistributionSummary,
    PowerLawFit,
    ccdf,
    fit_power_law,
    freedman_diaconis_bins,
    summarize,
)
from .series import (
    DrawdownEvent,
    ReturnSeries,
    event_sizes,
    extract_drawdowns,
    log_returns,
    stride_sample,
)

__all__ = [
    "DistributionSummary",
    "PowerLawFit",
    "ccdf",
    "fit_power_law",
    "freedman_diaconis_bins",
    "summarize",
    "DrawdownEvent",
    "ReturnSeries",
    "event_sizes",
    "extract_drawdowns",
    "log_returns",
    "stride_sample",
]
