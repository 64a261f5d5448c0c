"""Daily index level series and their CSV ingestion."""

import os
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
import pandas as pd

from critnet.errors import (
    DataError,
    MissingColumnError,
    NonMonotonicDatesError,
    TooShortError,
    UnparseableDateError,
)


@dataclass(frozen=True)
class IndexDataset:
    """Closing levels of one market index.

    Dates are only used for ordering; the spacing between rows is taken as uniform.

    Attributes:
        name: Label of the index.
        dates: Strictly increasing calendar dates (datetime64[D]).
        closes: Positive closing levels.
        dropped_rows: Rows dropped for missing or non-positive closes.
    """

    name: str
    dates: np.ndarray
    closes: np.ndarray
    dropped_rows: int = 0

    def __len__(self) -> int:
        return int(self.closes.size)


def get_dataset_name_from_path(path: str) -> str:
    """File name without extension, e.g. "djia" for "data/djia.csv"."""
    return os.path.splitext(os.path.basename(path))[0]


def ingest_csv(
    path: str,
    date_col: str = "Date",
    close_col: str = "Close",
    name: Optional[str] = None,
    min_length: int = 2,
) -> IndexDataset:
    """Read and validate a pre-cleaned index CSV with a header row.

    Rows whose close is missing, unparseable or not positive are dropped with a
    warning. The remaining dates must be ISO-8601 and strictly increasing.

    Args:
        path: CSV file.
        date_col: Name of the date column.
        close_col: Name of the closing level column.
        name: Dataset label, defaults to the file name.
        min_length: Minimum number of rows that must survive.
    """
    try:
        df = pd.read_csv(path)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DataError(f"Cannot read index CSV {path}: {e}") from e

    missing = [c for c in (date_col, close_col) if c not in df.columns]
    if missing:
        raise MissingColumnError(f"Columns {missing} not found in {path}.")

    closes = pd.to_numeric(df[close_col], errors="coerce")
    keep = closes.notna() & (closes > 0)
    dropped = int((~keep).sum())
    if dropped:
        warnings.warn(f"{dropped} rows of {path} without a positive close dropped.")

    try:
        dates = pd.to_datetime(df.loc[keep, date_col], format="ISO8601")
    except (ValueError, TypeError) as e:
        raise UnparseableDateError(f"Unparseable date in {path}: {e}") from e
    if dates.isna().any():
        raise UnparseableDateError(f"Missing dates in {path}.")

    dates = dates.to_numpy().astype("datetime64[D]")
    if np.any(np.diff(dates) <= np.timedelta64(0, "D")):
        raise NonMonotonicDatesError(f"Dates of {path} are not strictly increasing.")

    if dates.size < min_length:
        raise TooShortError(
            f"{dates.size} usable rows in {path}, at least {min_length} needed."
        )

    return IndexDataset(
        name=name or get_dataset_name_from_path(path),
        dates=dates,
        closes=closes[keep].to_numpy(dtype=np.float64),
        dropped_rows=dropped,
    )
