"""Galton-Watson trees of collapses and the tree-size scaling check."""

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from critnet.errors import DomainError
from critnet.stats.fitting import PowerLawFit, fit_power_law

from .criticality import BranchingEstimate

OTTER_XMIN = 4
DRIFT_TOLERANCE = 0.05
MIN_OTTER_TREES = 100_000

# critical binary branching, 0 or 2 children with probability 1/2
BINARY_LAW = np.array([0.5, 0.0, 0.5])


def offspring_law(
    gamma: float, omega: float, k0: int = 1, k_max: int = 10_000
) -> np.ndarray:
    """Offspring distribution of a collapse, q_k = (k0/omega)^2 k^-(gamma+2) for k >= 1.

    Its mean (k0/omega)^2 sum_k k^-(gamma+1) is the closure sum of
    `expected_offspring`, and q_0 takes the remaining mass.

    Returns:
        Probabilities q_0..q_{k_max}.
    """
    if not gamma > 0:
        raise DomainError(f"gamma={gamma} must be positive.")
    k = np.arange(1, k_max + 1, dtype=np.float64)
    q = (k0 / omega) ** 2 * k ** -(gamma + 2.0)
    q0 = 1.0 - q.sum()
    if q0 < 0:
        raise DomainError(
            f"omega={omega} too small for a probability law (mass {q.sum():.4f} > 1)."
        )
    return np.concatenate([[q0], q])


def offspring_mean(pmf: np.ndarray) -> float:
    pmf = np.asarray(pmf, dtype=np.float64)
    return float(np.dot(np.arange(pmf.size), pmf))


def sample_offspring(
    pmf: np.ndarray, n_trials: int, rng: np.random.Generator
) -> BranchingEstimate:
    """Monte Carlo estimate of the mean offspring of `pmf`."""
    draws = rng.choice(len(pmf), size=n_trials, p=pmf)
    return BranchingEstimate(
        expected_offspring=float(draws.mean()),
        std_error=float(draws.std(ddof=1) / np.sqrt(n_trials)),
        n_trials=int(n_trials),
    )


def galton_watson_sizes(
    pmf: np.ndarray,
    n_trees: int,
    rng: np.random.Generator,
    max_size: int = 10_000,
) -> np.ndarray:
    """Total sizes of `n_trees` Galton-Watson trees with offspring law `pmf`.

    All living trees advance one generation per iteration. Trees reaching `max_size`
    stop growing and are reported as `max_size`.
    """
    pmf = np.asarray(pmf, dtype=np.float64)
    support = np.arange(pmf.size)
    sizes = np.ones(n_trees, dtype=np.int64)
    generation = np.ones(n_trees, dtype=np.int64)
    alive = np.arange(n_trees)

    while alive.size:
        parents = generation[alive]
        draws = rng.choice(support, size=int(parents.sum()), p=pmf)
        owner = np.repeat(np.arange(alive.size), parents)
        children = np.bincount(owner, weights=draws, minlength=alive.size)
        children = children.astype(np.int64)

        sizes[alive] += children
        generation[alive] = children
        alive = alive[(children > 0) & (sizes[alive] < max_size)]

    return np.minimum(sizes, max_size)


@dataclass(frozen=True)
class OtterResult:
    """Tree-size scaling of a branching process.

    Attributes:
        exponent: Fitted PDF exponent of the tree sizes, 3/2 at criticality.
        fit: Full regression record.
        offspring: Mean offspring of the law used.
        n_censored: Trees that reached the size cap.
    """

    exponent: float
    fit: PowerLawFit
    offspring: BranchingEstimate
    n_censored: int


def otter_check(
    offspring_gamma: float,
    omega: float,
    n_trees: int,
    rng: np.random.Generator,
    k0: int = 1,
    pmf: Optional[np.ndarray] = None,
    max_size: int = 10_000,
) -> OtterResult:
    """Simulate collapse trees and fit the tail of their size distribution.

    At least 10^5 trees are needed for a slope within 0.2 of 3/2; fewer trees, or a
    law whose mean deviates from 1 by more than 0.05, trigger a RuntimeWarning.

    Args:
        offspring_gamma: Degree exponent of the offspring law.
        omega: (1 + d_th) / (1 - d_th) of the offspring law.
        n_trees: Number of trees.
        rng: Seeded numpy generator.
        k0: Initial outgoing connections.
        pmf: Explicit offspring law, overriding the model law.
        max_size: Size cap; the regression stops at max_size / 10.
    """
    if n_trees < MIN_OTTER_TREES:
        warnings.warn(
            f"{n_trees} trees are fewer than {MIN_OTTER_TREES}, the fitted slope is "
            "not reliable.",
            RuntimeWarning,
        )
    if pmf is None:
        pmf = offspring_law(offspring_gamma, omega, k0)
    mean = offspring_mean(pmf)
    if abs(mean - 1.0) > DRIFT_TOLERANCE:
        regime = "supercritical" if mean > 1 else "subcritical"
        warnings.warn(
            f"Mean offspring {mean:.4f} is {regime}, tree sizes drift away from "
            "the critical scaling.",
            RuntimeWarning,
        )

    sizes = galton_watson_sizes(pmf, n_trees, rng, max_size)
    fit = fit_power_law(sizes, method="ccdf", xmin=OTTER_XMIN, xmax=max_size // 10)
    return OtterResult(
        exponent=fit.exponent,
        fit=fit,
        offspring=BranchingEstimate(expected_offspring=mean, k_max=len(pmf) - 1),
        n_censored=int((sizes >= max_size).sum()),
    )
