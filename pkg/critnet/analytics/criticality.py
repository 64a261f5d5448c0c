"""Closed-form criticality machinery: zeta, thresholds, branching, exponents."""

import math
import warnings
from dataclasses import dataclass, replace
from typing import Callable, Optional, Union

import numpy as np
from scipy.special import bernoulli

from critnet.errors import DomainError

# Euler-Maclaurin parameters: terms summed directly and Bernoulli corrections.
_EM_DIRECT_TERMS = 20
_EM_CORRECTIONS = 8
_BERNOULLI = bernoulli(2 * _EM_CORRECTIONS)

# tail of sum_k k^-gamma allowed beyond k_max
TAIL_TOLERANCE = 1e-9
K_MAX_CAP = 10_000_000
_CHUNK = 1_000_000

ArrayLike = Union[float, np.ndarray]


def zeta(s: float) -> float:
    """Riemann zeta function for real s > 1.

    Partial sum of the first terms plus the integral tail N^(1-s)/(s-1), refined with
    Euler-Maclaurin corrections. Absolute error is far below 1e-12 on (1, inf).
    """
    s = float(s)
    if not s > 1.0:
        raise DomainError(f"zeta(s) diverges for s={s} <= 1.")

    n = _EM_DIRECT_TERMS
    k = np.arange(1, n, dtype=np.float64)
    total = np.sum(k**-s) + n ** (1.0 - s) / (s - 1.0) + 0.5 * n**-s

    rising = s  # s (s+1) ... (s+2j-2)
    for j in range(1, _EM_CORRECTIONS + 1):
        coeff = _BERNOULLI[2 * j] / math.factorial(2 * j)
        total += coeff * rising * n ** (-s - 2 * j + 1)
        rising *= (s + 2 * j - 1) * (s + 2 * j)
    return float(total)


def power_tail_bound(s: float, n: int) -> float:
    """Upper bound of sum_{k>n} k^-s, the integral of x^-s over [n, inf)."""
    return n ** (1.0 - s) / (s - 1.0)


def omega(d_th: float) -> float:
    """Degree-ratio form of the collapse band, (1 + d_th) / (1 - d_th)."""
    if not 0.0 <= d_th < 1.0:
        raise DomainError(f"d_th={d_th} outside [0, 1).")
    return (1.0 + d_th) / (1.0 - d_th)


def d_th_from_omega(omega: float) -> float:
    """Inverse of `omega`."""
    if not omega >= 1.0:
        raise DomainError(f"omega={omega} < 1 has no threshold in [0, 1).")
    return (omega - 1.0) / (omega + 1.0)


@dataclass(frozen=True)
class CriticalSolution:
    """Threshold at which one collapse induces on average one further collapse.

    Attributes:
        gamma: Degree exponent.
        k0: Initial outgoing connections per agent.
        omega: (1 + d_th) / (1 - d_th).
        d_th: Collapse threshold.
        variant: "printed" for omega^2 = k0^2 zeta(gamma + 1), "intermediate" for
            the zeta(gamma) form, "custom" for a hand-set threshold.
    """

    gamma: float
    k0: int
    omega: float
    d_th: float
    variant: str = "printed"

    def with_threshold(self, d_th: float) -> "CriticalSolution":
        """Same gamma and k0 at another threshold, e.g. to examine off-critical states."""
        return replace(self, omega=omega(d_th), d_th=d_th, variant="custom")


def critical_threshold(
    gamma: float, k0: int = 1, variant: str = "printed"
) -> CriticalSolution:
    """Solve omega^2 = k0^2 zeta(gamma + 1) for the critical threshold.

    Args:
        gamma: Degree exponent, > 0.
        k0: Initial outgoing connections, >= 1.
        variant: "printed" (authoritative) or "intermediate", which uses zeta(gamma)
            as the line preceding the closed form suggests.
    """
    if not gamma > 0:
        raise DomainError(f"gamma={gamma} must be positive.")
    if k0 < 1:
        raise DomainError(f"k0={k0} must be >= 1.")
    if variant == "printed":
        z = zeta(gamma + 1.0)
    elif variant == "intermediate":
        z = zeta(gamma)
    else:
        raise ValueError(f"Unknown variant '{variant}'.")

    om = k0 * math.sqrt(z)
    if om < 1.0:
        raise DomainError(f"omega={om} < 1, no threshold in [0, 1).")
    return CriticalSolution(
        gamma=float(gamma),
        k0=int(k0),
        omega=om,
        d_th=d_th_from_omega(om),
        variant=variant,
    )


def branching_probability(
    k_in: ArrayLike, omega: float, gamma: float, k0: int = 1
) -> ArrayLike:
    """Probability min(1, k0 (omega k_in)^-gamma) that a neighbor also collapses."""
    k_in = np.asarray(k_in, dtype=np.float64)
    if np.any(k_in < 1):
        raise DomainError("branching_probability needs k_in >= 1.")
    if not omega >= 1.0:
        raise DomainError(f"omega={omega} < 1.")
    p = np.minimum(1.0, k0 * (omega * k_in) ** -gamma)
    return float(p) if p.ndim == 0 else p


@dataclass(frozen=True)
class BranchingEstimate:
    """Expected number of collapsing neighbors per collapse.

    For analytic sums `std_error` is 0 and `n_trials` is 0; Monte Carlo estimates fill
    both. `truncated` flags sums whose k_max violates the tail tolerance.
    """

    expected_offspring: float
    std_error: float = 0.0
    n_trials: int = 0
    k_max: Optional[int] = None
    truncated: bool = False


def required_k_max(gamma: float, tol: float = TAIL_TOLERANCE) -> int:
    """Smallest k_max with sum_{k>k_max} k^-gamma bounded by `tol`."""
    if not gamma > 1:
        return K_MAX_CAP + 1
    k_max = math.ceil(((gamma - 1.0) * tol) ** (1.0 / (1.0 - gamma)))
    return max(1, min(k_max, K_MAX_CAP + 1))


def chunked_sum(fn: Callable[[np.ndarray], np.ndarray], k_max: int) -> float:
    """sum_{k=1}^{k_max} fn(k), evaluated in memory-bounded chunks."""
    total = 0.0
    for start in range(1, k_max + 1, _CHUNK):
        k = np.arange(start, min(start + _CHUNK, k_max + 1), dtype=np.float64)
        total += float(np.sum(fn(k)))
    return total


def expected_offspring(
    solution: CriticalSolution, k_max: Optional[int] = None, form: str = "closure"
) -> BranchingEstimate:
    """Expected collapsing neighbors of one collapse.

    Args:
        solution: gamma, k0 and omega at which to evaluate.
        k_max: Truncation of the degree sums. None derives it from the tail bound.
        form: "closure" evaluates (k0/omega)^2 sum_k k^-(gamma+1), the condition whose
            root is the closed-form threshold. "degree_weighted" evaluates
            sum_k k P(k) P_br(k) with P(k) = k^-gamma normalized over [1, k_max] and
            the clamped branching probability.
    """
    gamma, k0, om = solution.gamma, solution.k0, solution.omega
    if k_max is None:
        k_max = min(required_k_max(gamma), K_MAX_CAP)
    truncated = gamma <= 1 or power_tail_bound(gamma, k_max) > TAIL_TOLERANCE
    if truncated:
        warnings.warn(
            f"Degree sums truncated at k_max={k_max} exceed the tail tolerance "
            f"{TAIL_TOLERANCE} for gamma={gamma}."
        )

    if form == "closure":
        value = (k0 / om) ** 2 * chunked_sum(lambda k: k ** -(gamma + 1.0), k_max)
    elif form == "degree_weighted":
        norm = chunked_sum(lambda k: k**-gamma, k_max)
        value = chunked_sum(
            lambda k: k * k**-gamma * np.minimum(1.0, k0 * (om * k) ** -gamma), k_max
        )
        value /= norm
    else:
        raise ValueError(f"Unknown form '{form}'.")

    return BranchingEstimate(
        expected_offspring=value, k_max=int(k_max), truncated=bool(truncated)
    )


def predicted_exponent(gamma: float) -> float:
    """Avalanche-size CCDF exponent m = 3 gamma / 2 - 1."""
    if not gamma > 0:
        raise DomainError(f"gamma={gamma} must be positive.")
    return 1.5 * gamma - 1.0
