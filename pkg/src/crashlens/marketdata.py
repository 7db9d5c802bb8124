"""Price-table ingestion, log returns, and sliding windows.

CSV comes in two layouts: wide (`date,SYM1,SYM2,...`) and long
(`date,symbol,close`).  Symbols with poor date coverage are dropped, never
interpolated; the survivors are inner-joined on dates.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import IO

import numpy as np

from .errors import DataError, UsageError

__all__ = [
    "PriceTable",
    "ReturnTable",
    "WindowView",
    "TableSchema",
    "load_price_table",
    "compute_log_returns",
    "dump_wide_csv",
    "window_slices",
]


def _frozen_array(values, dtype=float) -> np.ndarray:
    # Copy before freezing so the caller's array is never locked.
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PriceTable:
    """Aligned close prices, one row per trading day, one column per symbol."""

    symbols: tuple[str, ...]
    dates: tuple[str, ...]
    prices: np.ndarray  # (T, m), strictly positive

    def __post_init__(self) -> None:
        arr = _frozen_array(self.prices)
        if arr.ndim != 2 or arr.shape != (len(self.dates), len(self.symbols)):
            raise DataError(
                f"price matrix shape {arr.shape} does not match "
                f"{len(self.dates)} dates x {len(self.symbols)} symbols"
            )
        if len(set(self.symbols)) != len(self.symbols):
            raise DataError("duplicate symbols in price table")
        if any(a >= b for a, b in zip(self.dates, self.dates[1:])):
            raise DataError("dates must be strictly increasing")
        if not np.all(np.isfinite(arr)):
            raise DataError("prices must be finite")
        if arr.size and arr.min() <= 0:
            t, i = np.unravel_index(int(np.argmin(arr)), arr.shape)
            raise DataError(
                f"non-positive price for {self.symbols[i]} on {self.dates[t]}"
            )
        object.__setattr__(self, "prices", arr)

    @property
    def shape(self) -> tuple[int, int]:
        return self.prices.shape


@dataclass(frozen=True)
class ReturnTable:
    """Log returns; row t is ln(p[t+1]) - ln(p[t]), dated by the later price."""

    symbols: tuple[str, ...]
    dates: tuple[str, ...]
    returns: np.ndarray  # (T-1, m)

    def __post_init__(self) -> None:
        arr = _frozen_array(self.returns)
        if arr.ndim != 2 or arr.shape != (len(self.dates), len(self.symbols)):
            raise DataError("return matrix shape does not match labels")
        object.__setattr__(self, "returns", arr)

    @property
    def shape(self) -> tuple[int, int]:
        return self.returns.shape


@dataclass(frozen=True)
class WindowView:
    """One sliding-window slice of a return table."""

    start: int
    length: int
    returns: np.ndarray  # (length, m)

    def __post_init__(self) -> None:
        if self.start < 0 or self.length < 2:
            raise DataError("window needs start >= 0 and length >= 2")
        if self.returns.shape[0] != self.length:
            raise DataError("window slice length mismatch")


@dataclass(frozen=True)
class TableSchema:
    """Column mapping for CSV ingestion; layout is 'wide' or 'long'."""

    layout: str = "wide"
    date_column: str = "date"
    symbol_column: str = "symbol"
    close_column: str = "close"

    def __post_init__(self) -> None:
        if self.layout not in ("wide", "long"):
            raise UsageError(f"unknown CSV layout {self.layout!r}")


def _parse_price(raw: str, line: int) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise DataError(f"line {line}: cannot parse price {raw!r}") from None
    if not math.isfinite(value):
        raise DataError(f"line {line}: non-finite price {raw!r}")
    return value


def _read_cells(
    source: str | Path | IO[str], schema: TableSchema
) -> dict[str, dict[str, float]]:
    """Parse CSV into {symbol: {date: close}}, validating row shape per line."""
    if isinstance(source, (str, Path)):
        try:
            handle: IO[str] = open(source, newline="", encoding="utf-8")
        except OSError as exc:
            raise DataError(f"cannot open {source}: {exc}") from None
        close_after = True
    else:
        handle, close_after = source, False
    try:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError("empty input: header row required") from None
        header = [h.strip() for h in header]

        cells: dict[str, dict[str, float]] = {}
        if schema.layout == "wide":
            if not header or header[0] != schema.date_column:
                raise DataError(
                    f"line 1: first column must be {schema.date_column!r}, got {header[:1]}"
                )
            symbols = header[1:]
            if not symbols:
                raise DataError("line 1: no symbol columns")
            for sym in symbols:
                cells[sym] = {}
            for line, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != len(header):
                    raise DataError(
                        f"line {line}: expected {len(header)} fields, got {len(row)}"
                    )
                date = row[0].strip()
                for sym, raw in zip(symbols, row[1:]):
                    raw = raw.strip()
                    if raw == "":
                        continue  # missing cell; handled by coverage policy
                    if date in cells[sym]:
                        raise DataError(f"line {line}: duplicate date {date!r}")
                    cells[sym][date] = _parse_price(raw, line)
        else:
            try:
                d_idx = header.index(schema.date_column)
                s_idx = header.index(schema.symbol_column)
                c_idx = header.index(schema.close_column)
            except ValueError as exc:
                raise DataError(f"line 1: missing column: {exc}") from None
            for line, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != len(header):
                    raise DataError(
                        f"line {line}: expected {len(header)} fields, got {len(row)}"
                    )
                date = row[d_idx].strip()
                sym = row[s_idx].strip()
                raw = row[c_idx].strip()
                if raw == "":
                    continue
                per_sym = cells.setdefault(sym, {})
                if date in per_sym:
                    raise DataError(
                        f"line {line}: duplicate (date, symbol) = ({date!r}, {sym!r})"
                    )
                per_sym[date] = _parse_price(raw, line)
        return cells
    finally:
        if close_after:
            handle.close()


def load_price_table(
    source: str | Path | IO[str],
    schema: TableSchema | None = None,
    coverage_threshold: float = 0.9,
    exclusions: list[dict] | None = None,
) -> PriceTable:
    """Load and align a price CSV.

    Symbols whose date coverage falls below ``coverage_threshold`` are dropped;
    if ``exclusions`` is given, one {"symbol", "coverage"} dict per dropped
    symbol is appended to it.  Retained symbols are inner-joined on dates.
    """
    schema = schema or TableSchema()
    if not 0.0 < coverage_threshold <= 1.0:
        raise UsageError(f"coverage threshold {coverage_threshold} outside (0, 1]")
    cells = _read_cells(source, schema)
    if not cells or all(not v for v in cells.values()):
        raise DataError("no price rows found")

    all_dates = sorted({d for per_sym in cells.values() for d in per_sym})
    kept: list[str] = []
    for sym in sorted(cells):
        coverage = len(cells[sym]) / len(all_dates)
        if coverage < coverage_threshold:
            if exclusions is not None:
                exclusions.append({"symbol": sym, "coverage": round(coverage, 6)})
        else:
            kept.append(sym)
    if not kept:
        raise DataError("all symbols fell below the coverage threshold")

    dates = [d for d in all_dates if all(d in cells[sym] for sym in kept)]
    if not dates:
        raise DataError("no dates common to all retained symbols")
    prices = np.empty((len(dates), len(kept)))
    for j, sym in enumerate(kept):
        per_sym = cells[sym]
        for t, d in enumerate(dates):
            prices[t, j] = per_sym[d]
    return PriceTable(tuple(kept), tuple(dates), prices)


def compute_log_returns(p: PriceTable) -> ReturnTable:
    """ln(p[t+1]) - ln(p[t]) per column."""
    if p.prices.shape[0] < 2:
        raise DataError("need at least 2 dates to compute returns")
    log_prices = np.log(p.prices)
    return ReturnTable(p.symbols, p.dates[1:], np.diff(log_prices, axis=0))


def dump_wide_csv(p: PriceTable) -> str:
    """Wide CSV text (date column first) that load_price_table reads back."""
    lines = [",".join(["date", *p.symbols])]
    for i, date in enumerate(p.dates):
        lines.append(",".join([date, *(repr(float(v)) for v in p.prices[i])]))
    return "\n".join(lines) + "\n"


def window_slices(r: ReturnTable, w: int, stride: int = 1) -> list[WindowView]:
    """All windows [k*stride, k*stride + w) that fit inside the return table."""
    n = r.returns.shape[0]
    if w < 2:
        raise UsageError(f"window length {w} below minimum of 2")
    if stride < 1:
        raise UsageError(f"stride must be >= 1, got {stride}")
    if w > n:
        raise DataError(f"window length {w} exceeds {n} available returns")
    out = []
    for start in range(0, n - w + 1, stride):
        out.append(WindowView(start, w, r.returns[start : start + w]))
    return out
