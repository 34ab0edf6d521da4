"""Load per-ticker close-price series, slice them into fixed-length windows,
and apply reversible min-max scaling.

Input files are comma-delimited text with header ``date,ticker,close`` and
ISO-8601 dates. A missing close is encoded as an empty field; unparseable
closes are treated as missing as well.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from datetime import date
from pathlib import Path

import numpy as np

from .errors import DuplicateRowError, SchemaError

REQUIRED_COLUMNS = ("date", "ticker", "close")


@dataclass(eq=False)
class TimeSeries:
    """Close-price history of one ticker. NaN marks a missing close."""

    ticker: str
    timestamps: list[date]
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if len(self.timestamps) != self.values.size:
            raise ValueError(
                f"{self.ticker}: {len(self.timestamps)} timestamps vs "
                f"{self.values.size} values"
            )
        for a, b in zip(self.timestamps, self.timestamps[1:]):
            if a >= b:
                raise ValueError(f"{self.ticker}: timestamps not strictly increasing at {b}")
        if np.isinf(self.values).any():
            raise ValueError(f"{self.ticker}: non-finite values other than NaN are not allowed")

    def __len__(self) -> int:
        return self.values.size


@dataclass(eq=False)
class Window:
    """Fixed-length slice of one ticker's series, optionally min-max scaled.

    ``scaled_values`` and the scale parameters are filled in by
    :func:`minmax_scale`; a freshly sliced window carries raw values only.
    A constant window scales every value to 0.5 and sets ``is_constant`` so
    the inverse transform can restore the original level.
    """

    ticker: str
    start_index: int
    raw_values: np.ndarray
    scale_min: float | None = None
    scale_max: float | None = None
    scaled_values: np.ndarray | None = None
    is_constant: bool = False

    def __post_init__(self):
        self.raw_values = np.asarray(self.raw_values, dtype=float)
        if self.scaled_values is not None:
            self.scaled_values = np.asarray(self.scaled_values, dtype=float)

    @property
    def length(self) -> int:
        return self.raw_values.size


def load_series(path: str | Path) -> list[TimeSeries]:
    """Read a ``date,ticker,close`` file into one TimeSeries per ticker.

    Rows are sorted by date within each ticker. Empty or unparseable close
    fields become NaN. Raises SchemaError on a bad header or unparseable
    date, DuplicateRowError on a repeated (ticker, date) key.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in REQUIRED_COLUMNS if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing required column(s) {missing}")

        rows: dict[str, dict[date, float]] = {}
        for lineno, row in enumerate(reader, start=2):
            ticker = (row["ticker"] or "").strip()
            raw_date = (row["date"] or "").strip()
            try:
                ts = date.fromisoformat(raw_date)
            except ValueError as exc:
                raise SchemaError(f"{path}:{lineno}: bad date {raw_date!r}") from exc
            raw_close = (row["close"] or "").strip()
            try:
                close = float(raw_close) if raw_close else math.nan
            except ValueError:
                close = math.nan
            if not math.isnan(close) and math.isinf(close):
                close = math.nan
            per_ticker = rows.setdefault(ticker, {})
            if ts in per_ticker:
                raise DuplicateRowError(f"{path}: duplicate row for ({ticker}, {ts})")
            per_ticker[ts] = close

    out = []
    for ticker in sorted(rows):
        dates = sorted(rows[ticker])
        values = np.array([rows[ticker][d] for d in dates], dtype=float)
        out.append(TimeSeries(ticker=ticker, timestamps=dates, values=values))
    return out


def slice_windows(series: TimeSeries, length: int, stride: int | None = None) -> list[Window]:
    """Slice ``series`` into windows at offsets 0, stride, 2*stride, ...

    Windows containing a missing value are dropped. ``stride`` defaults to
    ``length`` (non-overlapping). A series shorter than ``length`` yields an
    empty list.
    """
    if length < 2:
        raise ValueError(f"window length must be >= 2, got {length}")
    if stride is None:
        stride = length
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")

    values = series.values
    out = []
    for start in range(0, len(values) - length + 1, stride):
        chunk = values[start : start + length]
        if np.isnan(chunk).any():
            continue
        out.append(Window(ticker=series.ticker, start_index=start, raw_values=chunk.copy()))
    return out


def minmax_scale(window: Window) -> Window:
    """Return a copy of ``window`` with values scaled to [0, 1].

    The minimum maps to 0 and the maximum to 1. A constant window maps every
    value to 0.5 and sets the constant flag.
    """
    raw = window.raw_values
    if np.isnan(raw).any():
        raise ValueError(f"{window.ticker}@{window.start_index}: window contains missing values")
    lo = float(raw.min())
    hi = float(raw.max())
    if hi > lo:
        scaled = (raw - lo) / (hi - lo)
        constant = False
    else:
        scaled = np.full_like(raw, 0.5)
        constant = True
    return Window(
        ticker=window.ticker,
        start_index=window.start_index,
        raw_values=raw.copy(),
        scale_min=lo,
        scale_max=hi,
        scaled_values=scaled,
        is_constant=constant,
    )


def inverse_scale(window: Window) -> Window:
    """Map a scaled window back to raw price space.

    For constant windows every value is restored to ``scale_min``.
    """
    if window.scaled_values is None or window.scale_min is None or window.scale_max is None:
        raise ValueError("window has not been scaled")
    raw = inverse_transform(window.scaled_values, window.scale_min, window.scale_max,
                            window.is_constant)
    return Window(ticker=window.ticker, start_index=window.start_index, raw_values=raw)


def inverse_transform(scaled: np.ndarray, scale_min: float, scale_max: float,
                      is_constant: bool = False) -> np.ndarray:
    """Inverse of the min-max map for an arbitrary array of scaled values."""
    scaled = np.asarray(scaled, dtype=float)
    if is_constant or scale_max <= scale_min:
        return np.full_like(scaled, scale_min)
    return scale_min + scaled * (scale_max - scale_min)


def write_windows(windows: list[Window], path: str | Path) -> None:
    """Serialize windows as line-delimited JSON records."""
    with Path(path).open("w") as fh:
        for w in windows:
            rec = {"ticker": w.ticker, "start_index": w.start_index,
                   "values": [float(v) for v in w.raw_values]}
            fh.write(json.dumps(rec) + "\n")


def read_windows(path: str | Path) -> list[Window]:
    out = []
    with Path(path).open() as fh:
        for line in fh:
            rec = json.loads(line)
            out.append(Window(ticker=rec["ticker"], start_index=rec["start_index"],
                              raw_values=np.array(rec["values"], dtype=float)))
    return out
