"""Empirical CCDFs, power-law fits and distribution summaries."""

from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
from scipy import special, stats

from critnet.errors import InsufficientDataError, NoVarianceError

MIN_FIT_POINTS = 30
MAX_XMIN_CANDIDATES = 200
MAX_BINS = 1000


def ccdf(values) -> Tuple[np.ndarray, np.ndarray]:
    """P(X >= x) over the sorted distinct values.

    Returns:
        (x, p) with p[0] = 1 and p nonincreasing.
    """
    values = np.asarray(values, dtype=np.float64).ravel()
    if values.size == 0:
        raise InsufficientDataError("ccdf of an empty sample.")
    x, counts = np.unique(values, return_counts=True)
    below = np.concatenate([[0], np.cumsum(counts)[:-1]])
    return x, 1.0 - below / values.size


@dataclass(frozen=True)
class PowerLawFit:
    """Result of `fit_power_law`.

    The exponent always follows the PDF convention p(x) ~ x^-m. For the regression
    method `raw_slope` keeps the fitted log-log CCDF slope, equal to 1 - m.

    Attributes:
        exponent: Fitted m.
        method: "ccdf" or "mle".
        xmin: Lower cutoff.
        n_points: Number of values >= xmin.
        r_squared: Coefficient of determination of the regression, None for mle.
        log_likelihood: Log-likelihood at the estimate, None for ccdf.
        raw_slope: CCDF slope of the regression, None for mle.
        ks_distance: Kolmogorov-Smirnov distance of the tail to the fitted law.
        xmax: Upper end of the regression range, None for unbounded.
        discrete: Whether the discrete estimator was used.
        convention: Convention of `exponent`, always "pdf".
    """

    exponent: float
    method: str
    xmin: float
    n_points: int
    r_squared: Optional[float] = None
    log_likelihood: Optional[float] = None
    raw_slope: Optional[float] = None
    ks_distance: float = np.nan
    xmax: Optional[float] = None
    discrete: bool = False
    convention: str = "pdf"


def _mle_exponent(tail: np.ndarray, xmin: float, discrete: bool) -> float:
    shift = xmin - 0.5 if discrete else xmin
    log_sum = np.log(tail / shift).sum()
    if log_sum <= 0:
        raise NoVarianceError("All values above xmin are equal.")
    return 1.0 + tail.size / log_sum


def _log_likelihood(tail: np.ndarray, m: float, xmin: float, discrete: bool) -> float:
    n = tail.size
    if discrete:
        return float(-n * np.log(special.zeta(m, xmin)) - m * np.log(tail).sum())
    return float(n * np.log(m - 1.0) - n * np.log(xmin) - m * np.log(tail / xmin).sum())


def _ks_distance(tail: np.ndarray, m: float, xmin: float) -> float:
    """Sup distance between the empirical CDF of `tail` and the continuous law."""
    x = np.sort(tail)
    n = x.size
    model = 1.0 - (x / xmin) ** (1.0 - m)
    upper = np.arange(1, n + 1) / n - model
    lower = model - np.arange(n) / n
    return float(max(upper.max(), lower.max()))


def _select_xmin(
    values: np.ndarray, discrete: bool, min_points: int
) -> float:
    """xmin minimizing the KS distance of the MLE fit above it."""
    x = np.sort(values)
    distinct = np.unique(x[: x.size - min_points + 1])
    if distinct.size > MAX_XMIN_CANDIDATES:
        idx = np.linspace(0, distinct.size - 1, MAX_XMIN_CANDIDATES).astype(int)
        distinct = np.unique(distinct[idx])

    best, best_d = None, np.inf
    for candidate in distinct:
        tail = x[x >= candidate]
        if tail.size < min_points or tail[-1] == tail[0]:
            continue
        m = _mle_exponent(tail, candidate, discrete)
        d = _ks_distance(tail, m, candidate)
        if d < best_d:
            best, best_d = float(candidate), d
    if best is None:
        raise NoVarianceError("No xmin candidate leaves a varying tail.")
    return best


def fit_power_law(
    values,
    method: str = "ccdf",
    xmin: Union[str, float] = "auto",
    discrete: bool = False,
    xmax: Optional[float] = None,
    min_points: int = MIN_FIT_POINTS,
) -> PowerLawFit:
    """Fit p(x) ~ x^-m to the tail x >= xmin of positive `values`.

    Args:
        values: Sample; non-positive and non-finite entries are ignored.
        method: "ccdf" for least squares on the log-log CCDF, "mle" for the Hill-type
            estimator m = 1 + n / sum(ln(x / xmin)).
        xmin: Lower cutoff, or "auto" for Kolmogorov-Smirnov minimization.
        discrete: Use the xmin - 1/2 correction of the estimator for integer data.
        xmax: Largest x entering the regression; the CCDF itself is built from the
            whole tail, so censored values above xmax do not bias it.
        min_points: Minimum number of values above xmin.
    """
    if method not in ("ccdf", "mle"):
        raise ValueError(f"Unknown fit method '{method}'.")
    if xmax is not None and method != "ccdf":
        raise ValueError("xmax only restricts the ccdf regression.")

    x = np.asarray(values, dtype=np.float64).ravel()
    x = x[np.isfinite(x) & (x > 0)]
    if x.size < min_points:
        raise InsufficientDataError(
            f"{x.size} positive values, at least {min_points} needed for a fit."
        )
    if x.min() == x.max():
        raise NoVarianceError("All values are equal, no power law to fit.")

    xmin = _select_xmin(x, discrete, min_points) if xmin == "auto" else float(xmin)
    tail = x[x >= xmin]
    if tail.size < min_points:
        raise InsufficientDataError(
            f"{tail.size} values >= xmin={xmin}, at least {min_points} needed."
        )
    if tail.min() == tail.max():
        raise NoVarianceError(f"All values >= xmin={xmin} are equal.")

    if method == "mle":
        m = _mle_exponent(tail, xmin, discrete)
        return PowerLawFit(
            exponent=m,
            method=method,
            xmin=xmin,
            n_points=int(tail.size),
            log_likelihood=_log_likelihood(tail, m, xmin, discrete),
            ks_distance=_ks_distance(tail, m, xmin),
            discrete=discrete,
        )

    xs, p = ccdf(tail)
    if xmax is not None:
        keep = xs <= xmax
        xs, p = xs[keep], p[keep]
    if xs.size < 2:
        raise NoVarianceError("Fewer than two distinct values in the regression range.")
    reg = stats.linregress(np.log(xs), np.log(p))
    m = 1.0 - reg.slope
    return PowerLawFit(
        exponent=float(m),
        method=method,
        xmin=xmin,
        n_points=int(tail.size),
        r_squared=float(reg.rvalue**2),
        raw_slope=float(reg.slope),
        ks_distance=_ks_distance(tail, m, xmin) if m > 1 else np.nan,
        xmax=xmax,
        discrete=discrete,
    )


@dataclass(frozen=True)
class DistributionSummary:
    """Moments and a density histogram of a sample."""

    n: int
    mean: float
    std: float
    skewness: float
    excess_kurtosis: float
    bin_edges: np.ndarray
    density: np.ndarray


def freedman_diaconis_bins(x: np.ndarray) -> int:
    """Number of bins of width 2 IQR n^(-1/3), capped at MAX_BINS for heavy tails."""
    width = 2.0 * stats.iqr(x) * x.size ** (-1.0 / 3.0)
    if width <= 0:
        return 1
    return int(min(MAX_BINS, max(1, np.ceil((x.max() - x.min()) / width))))


def summarize(values, bins: Optional[int] = None) -> DistributionSummary:
    """Moment estimators and a density histogram (Freedman-Diaconis bins by default).

    Skewness and kurtosis are the plain moment ratios, so a symmetric two-point sample
    has excess kurtosis exactly -2.
    """
    x = np.asarray(values, dtype=np.float64).ravel()
    x = x[np.isfinite(x)]
    if x.size < 4:
        raise InsufficientDataError(f"{x.size} values, at least 4 needed to summarize.")
    if x.min() == x.max():
        raise NoVarianceError("Constant sample has undefined higher moments.")

    if bins is None:
        bins = freedman_diaconis_bins(x)
    edges = np.histogram_bin_edges(x, bins=int(bins))
    density, edges = np.histogram(x, bins=edges, density=True)
    return DistributionSummary(
        n=int(x.size),
        mean=float(x.mean()),
        std=float(x.std(ddof=1)),
        skewness=float(stats.skew(x)),
        excess_kurtosis=float(stats.kurtosis(x, fisher=True, bias=True)),
        bin_edges=edges,
        density=density,
    )
