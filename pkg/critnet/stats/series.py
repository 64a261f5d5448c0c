"""Log returns, sub-sampling and drawdown events of level series."""

import warnings
from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

import numpy as np

from critnet.errors import InsufficientDataError


@dataclass(frozen=True)
class ReturnSeries:
    """Log returns r_t = ln(x_t / x_{t-1}) of consecutive positive levels.

    Attributes:
        index: Position (or timestamp) of the later level of each pair.
        values: Log returns, all finite.
        excluded_count: Pairs dropped because a level was not positive.
    """

    index: np.ndarray
    values: np.ndarray
    excluded_count: int = 0

    def __len__(self) -> int:
        return int(self.values.size)


def log_returns(levels, index: Optional[Sequence] = None) -> ReturnSeries:
    """Log returns of `levels`, skipping every pair that touches a non-positive level.

    Args:
        levels: Level series, e.g. closing prices or U_t.
        index: Optional labels of the levels; defaults to positions.
    """
    x = np.asarray(levels, dtype=np.float64).ravel()
    labels = np.arange(x.size) if index is None else np.asarray(index)
    usable = np.isfinite(x) & (x > 0)
    if usable.sum() < 2:
        raise InsufficientDataError(
            f"{int(usable.sum())} positive levels, at least 2 needed for a return."
        )

    valid = usable[1:] & usable[:-1]
    if not valid.any():
        raise InsufficientDataError(
            "No two consecutive positive levels, no return can be formed."
        )
    excluded = int((~valid).sum())
    if excluded:
        warnings.warn(f"{excluded} return pairs with non-positive levels excluded.")

    values = np.log(x[1:][valid] / x[:-1][valid])
    return ReturnSeries(index=labels[1:][valid], values=values, excluded_count=excluded)


def stride_sample(series, stride: int) -> np.ndarray:
    """Elements at positions 0, stride, 2 stride, ..."""
    if stride < 1:
        raise ValueError(f"stride={stride} must be >= 1.")
    return np.asarray(series)[::stride]


@dataclass(frozen=True)
class DrawdownEvent:
    """Maximal run of strictly negative returns, end_index inclusive."""

    start_index: int
    end_index: int
    magnitude: float
    length: int


def extract_drawdowns(
    returns: Union[ReturnSeries, Sequence[float]],
) -> List[DrawdownEvent]:
    """Split a return series into maximal runs of negative returns.

    Zero returns break runs. Indices are positions in the return array.
    """
    r = returns.values if isinstance(returns, ReturnSeries) else returns
    r = np.asarray(r, dtype=np.float64).ravel()
    negative = np.concatenate([[False], r < 0, [False]]).astype(np.int8)
    edges = np.diff(negative)
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1) - 1

    return [
        DrawdownEvent(
            start_index=int(s),
            end_index=int(e),
            magnitude=float(-r[s : e + 1].sum()),
            length=int(e - s + 1),
        )
        for s, e in zip(starts, ends)
    ]


def event_sizes(events: Sequence[DrawdownEvent], mode: str = "magnitude") -> np.ndarray:
    """Sizes of drawdown events: summed |return| ("magnitude") or run "length"."""
    if mode == "magnitude":
        return np.array([e.magnitude for e in events], dtype=np.float64)
    if mode == "length":
        return np.array([e.length for e in events], dtype=np.int64)
    raise ValueError(f"Unknown size mode '{mode}'.")
