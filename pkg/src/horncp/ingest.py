"""Daily W series from per-minute OHLC bars.

For each UTC calendar day::

    w = (close of last minute - open of first minute) / (mean minute high - mean minute low)

The first and last minutes should be 00:00 and 23:59; when they are missing the
earliest/latest bar is used and the day is flagged. Days whose average high
equals their average low are dropped and reported, never imputed.
"""

from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, TextIO

from .types import Series

UTC = dt.timezone.utc
KAGGLE_COLUMNS = ("unix", "date", "symbol", "open", "high", "low", "close")


class IngestError(ValueError):
    pass


@dataclass(frozen=True)
class MinuteBar:
    timestamp: dt.datetime
    open: float
    high: float
    low: float
    close: float

    def __post_init__(self):
        prices = (self.open, self.high, self.low, self.close)
        if not all(math.isfinite(p) and p > 0 for p in prices):
            raise IngestError("prices must be positive and finite")
        lo, hi = min(self.open, self.close), max(self.open, self.close)
        if not (self.low <= lo and hi <= self.high):
            raise IngestError("bar violates low <= open, close <= high")


@dataclass(frozen=True)
class DailyW:
    date: dt.date
    w: float


@dataclass
class QualityReport:
    """Bookkeeping for days that were dropped or built from partial data."""

    dropped: list[dt.date] = field(default_factory=list)
    missing_open: list[dt.date] = field(default_factory=list)
    missing_close: list[dt.date] = field(default_factory=list)
    bars_per_day: dict[dt.date, int] = field(default_factory=dict)

    @property
    def drop_count(self) -> int:
        return len(self.dropped)

    def summary(self) -> str:
        return (f"days={len(self.bars_per_day)} dropped={self.drop_count} "
                f"missing_open={len(self.missing_open)} "
                f"missing_close={len(self.missing_close)}")


@dataclass
class _DayAccumulator:
    date: dt.date
    first: MinuteBar
    last: MinuteBar
    high_sum: float = 0.0
    low_sum: float = 0.0
    count: int = 0

    def add(self, bar: MinuteBar) -> None:
        self.last = bar
        self.high_sum += bar.high
        self.low_sum += bar.low
        self.count += 1


def _finish(acc: _DayAccumulator, report: QualityReport) -> Optional[DailyW]:
    report.bars_per_day[acc.date] = acc.count
    ft, lt = acc.first.timestamp, acc.last.timestamp
    if (ft.hour, ft.minute) != (0, 0):
        report.missing_open.append(acc.date)
    if (lt.hour, lt.minute) != (23, 59):
        report.missing_close.append(acc.date)
    spread = acc.high_sum / acc.count - acc.low_sum / acc.count
    if not spread > 0:
        report.dropped.append(acc.date)
        return None
    return DailyW(acc.date, (acc.last.close - acc.first.open) / spread)


def iter_daily_w(bars: Iterable[MinuteBar], report: QualityReport) -> Iterator[DailyW]:
    """Stream daily W values; ``bars`` must be in non-decreasing time order."""
    acc: Optional[_DayAccumulator] = None
    prev: Optional[dt.datetime] = None
    for bar in bars:
        ts = bar.timestamp
        if prev is not None and ts < prev:
            raise IngestError("unsorted input")
        prev = ts
        day = ts.date()
        if acc is None or day != acc.date:
            if acc is not None:
                out = _finish(acc, report)
                if out is not None:
                    yield out
            acc = _DayAccumulator(day, bar, bar)
        acc.add(bar)
    if acc is None:
        raise IngestError("no data")
    out = _finish(acc, report)
    if out is not None:
        yield out


def daily_w_series(bars: Iterable[MinuteBar],
                   date_range: Optional[tuple[dt.date, dt.date]] = None
                   ) -> tuple[list[DailyW], QualityReport]:
    """Daily W values (strictly increasing dates) and the quality report.

    ``date_range`` is inclusive on both ends.
    """
    if date_range is not None:
        lo, hi = date_range
        bars = (b for b in bars if lo <= b.timestamp.date() <= hi)
    report = QualityReport()
    days = list(iter_daily_w(bars, report))
    return days, report


def yearly_slice(days: Iterable[DailyW], year: int) -> Series:
    values = [d.w for d in days if d.date.year == year]
    if not values:
        raise IngestError("empty slice")
    if len(values) < 2:
        raise IngestError(f"year {year} has fewer than 2 days")
    return Series(values)


def year_gaps(days: Iterable[DailyW], year: int) -> list[dt.date]:
    """Calendar days of ``year`` absent from ``days``."""
    have = {d.date for d in days if d.date.year == year}
    start = dt.date(year, 1, 1)
    total = (dt.date(year + 1, 1, 1) - start).days
    return [start + dt.timedelta(days=i) for i in range(total)
            if start + dt.timedelta(days=i) not in have]


def _parse_unix(text: str) -> dt.datetime:
    value = float(text)
    # some exports store milliseconds
    if value > 1e11:
        value /= 1000.0
    return dt.datetime.fromtimestamp(value, tz=UTC)


def read_minute_bars(stream: TextIO, sort: bool = True) -> list[MinuteBar]:
    """Parse a headered Kaggle-layout CSV.

    Extra columns are ignored. Public exports of this feed list the newest
    minute first, so rows are sorted by timestamp unless ``sort`` is false.
    """
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise IngestError("no data") from None
    names = [h.strip().lower() for h in header]
    missing = [c for c in ("unix", "open", "high", "low", "close") if c not in names]
    if missing:
        raise IngestError(f"missing columns: {', '.join(missing)}")
    pos = {c: names.index(c) for c in ("unix", "open", "high", "low", "close")}
    bars = []
    for row in reader:
        line = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        try:
            bars.append(MinuteBar(
                _parse_unix(row[pos["unix"]]),
                float(row[pos["open"]]),
                float(row[pos["high"]]),
                float(row[pos["low"]]),
                float(row[pos["close"]]),
            ))
        except (ValueError, IndexError, OverflowError, OSError) as exc:
            raise IngestError(f"line {line}: malformed row ({exc})") from None
    if not bars:
        raise IngestError("no data")
    if sort:
        bars.sort(key=lambda b: b.timestamp)
    return bars


def write_daily_w(days: Iterable[DailyW], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["date", "w"])
    for d in days:
        writer.writerow([d.date.isoformat(), f"{d.w:.9g}"])


def read_daily_w(stream: TextIO) -> list[DailyW]:
    reader = csv.DictReader(stream)
    out = []
    for row in reader:
        try:
            out.append(DailyW(dt.date.fromisoformat(row["date"]), float(row["w"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise IngestError(f"line {reader.line_num}: malformed row ({exc})") from None
    return out
