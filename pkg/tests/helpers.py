"""Shared test utilities: synthetic Kaggle-layout minute data and the
acceptance log printed at the end of the run."""

import datetime as dt

UTC = dt.timezone.utc
# one line per acceptance criterion, filled by tests/test_acceptance.py
ACCEPTANCE_LINES: list[str] = []

HEADER = "unix,date,symbol,open,high,low,close,Volume BTC,Volume USD"


def bar_row(ts: dt.datetime, o, h, l, c) -> str:
    unix = int(ts.timestamp())
    return f"{unix},{ts:%Y-%m-%d %H:%M:%S},BTC/USD,{o},{h},{l},{c},1.0,{c}"


def two_bar_days(start: dt.date, days: int, newest_first: bool = True):
    """Rows with a 00:00 and a 23:59 bar per day; day ``i`` drifts by ``i % 7``."""
    rows = []
    for i in range(days):
        d = dt.datetime.combine(start + dt.timedelta(days=i), dt.time(), UTC)
        base = 100.0 + (i % 7)
        rows.append(bar_row(d, base, base + 2, base - 1, base + 1))
        rows.append(bar_row(d + dt.timedelta(minutes=1439), base + 1, base + 4,
                            base, base + 3 - (i % 3)))
    if newest_first:
        rows.reverse()
    return [HEADER] + rows
