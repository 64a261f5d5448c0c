from .branching import (
    BINARY_LAW,
    OtterResult,
    galton_watson_sizes,
    offspring_law,
    offspring_mean,
    otter_check,
    sample_offspring,
)
from .criticality import (
    BranchingEstimate,
    CriticalSolution,
    branching_probability,
    critical_threshold,
    d_th_from_omega,
    expected_offspring,
    omega,
    predicted_exponent,
    required_k_max,
    zeta,
)

__all__ = [
    "BINARY_LAW",
    "OtterResult",
    "galton_watson_sizes",
    "offspring_law",
    "offspring_mean",
    "otter_check",
    "sample_offspring",
    "BranchingEstimate",
    "CriticalSolution",
    "branching_probability",
    "critical_threshold",
    "d_th_from_omega",
    "expected_offspring",
    "omega",
    "predicted_exponent",
    "required_k_max",
    "zeta",
]
