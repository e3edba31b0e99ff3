"""Event logs, hourly binning, and the train/validation/test split protocol.

Time conventions: event timestamps are UTC epoch seconds (float), bin
boundaries are integral epoch seconds, bins are left-closed right-open and
aligned to the bin width. Bin widths are expressed in hours (default 1).
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, datetime, timedelta, timezone

import numpy as np

from .errors import (
    AlignmentError,
    DataError,
    EmptyWindowError,
    SplitRangeError,
)

HOUR_SECONDS = 3600
DAY_SECONDS = 86400

LONG_TERM = "long_term"
SHORT_TERM = "short_term"

#: test-window length used throughout: one week of hourly bins
DEFAULT_HORIZON = 168
#: bins per rolling short-term block: one day of hourly bins
DEFAULT_BLOCK = 24


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def width_seconds(bin_width: float) -> int:
    """Bin width in whole seconds; rejects widths that are not."""
    w = round(float(bin_width) * HOUR_SECONDS)
    if w <= 0 or abs(w - float(bin_width) * HOUR_SECONDS) > 1e-9:
        raise AlignmentError(f"bin width {bin_width}h is not a positive whole number of seconds")
    return w


def to_epoch(value) -> float:
    """Epoch seconds from a datetime/date/ISO string; naive values are UTC."""
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        value = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if isinstance(value, datetime):
        if value.tzinfo is None:
            value = value.replace(tzinfo=timezone.utc)
        return value.timestamp()
    if isinstance(value, date):
        return datetime(value.year, value.month, value.day, tzinfo=timezone.utc).timestamp()
    raise DataError(f"cannot interpret {value!r} as a timestamp")


def to_iso(epoch_s: float) -> str:
    """ISO-8601 UTC string for an integral epoch second."""
    dt = datetime.fromtimestamp(round(epoch_s), tz=timezone.utc)
    return dt.strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class EventLog:
    """Ordered event timestamps for one (domain, platform, topic) stream.

    Timestamps are sorted on construction, so binning is invariant to the
    input order of events.
    """

    events: np.ndarray
    platform: str = ""
    topic: str = ""
    domain: str = ""

    def __post_init__(self):
        ev = np.asarray(self.events, dtype=np.float64).ravel()
        if ev.size and not np.all(np.isfinite(ev)):
            raise DataError("event timestamps must be finite")
        object.__setattr__(self, "events", _frozen(np.sort(ev, kind="stable")))

    def __len__(self) -> int:
        return int(self.events.size)

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.domain, self.platform, self.topic)


@dataclass(frozen=True)
class BinnedSeries:
    """Fixed-width activity counts starting at an absolute bin boundary.

    Ground-truth counts are integral, model forecasts are real-valued; both
    are stored as float64.
    """

    start: int
    counts: np.ndarray
    bin_width: float = 1.0

    def __post_init__(self):
        w = width_seconds(self.bin_width)
        start = round(self.start)
        if abs(start - float(self.start)) > 1e-6:
            raise AlignmentError(f"series start {self.start} is not an integral second")
        if start % w != 0:
            raise AlignmentError(f"series start {start} is not a multiple of the {w}s bin width")
        counts = np.asarray(self.counts, dtype=np.float64).ravel()
        if counts.size < 1:
            raise DataError("a binned series holds at least one bin")
        if not np.all(np.isfinite(counts)) or np.any(counts < 0):
            raise DataError("bin counts must be finite and non-negative")
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "counts", _frozen(counts))

    def __len__(self) -> int:
        return int(self.counts.size)

    @property
    def width_seconds(self) -> int:
        return width_seconds(self.bin_width)

    @property
    def end(self) -> int:
        """Exclusive end boundary in epoch seconds."""
        return self.start + len(self) * self.width_seconds

    def index_of(self, epoch_s: float) -> int:
        """Bin index of an aligned boundary within this series."""
        w = self.width_seconds
        t = round(epoch_s)
        if t % w != 0:
            raise AlignmentError(f"{epoch_s} is not aligned to the {w}s bin grid")
        if not self.start <= t <= self.end:
            raise SplitRangeError(f"{epoch_s} lies outside [{self.start}, {self.end}]")
        return (t - self.start) // w

    def window(self, start_s: float, end_s: float) -> "BinnedSeries":
        """Aligned sub-series covering [start_s, end_s)."""
        i = self.index_of(start_s)
        j = self.index_of(end_s)
        if j <= i:
            raise EmptyWindowError(f"window [{start_s}, {end_s}) selects no bins")
        return BinnedSeries(self.start + i * self.width_seconds, self.counts[i:j], self.bin_width)

    def with_counts(self, counts: np.ndarray) -> "BinnedSeries":
        """Same grid, different values (used by models emitting forecasts)."""
        return BinnedSeries(self.start, counts, self.bin_width)


@dataclass(frozen=True)
class SplitSpec:
    """Contiguous train/validation/test windows, each (start, end] ... [start, end).

    Bounds are epoch seconds with exclusive ends; segments must be adjacent
    and ordered train < validation < test.
    """

    train: tuple[int, int]
    validation: tuple[int, int]
    test: tuple[int, int]

    def __post_init__(self):
        segs = [self.train, self.validation, self.test]
        norm = []
        for name, (a, b) in zip(("train", "validation", "test"), segs):
            a, b = round(a), round(b)
            if b <= a:
                raise SplitRangeError(f"{name} segment [{a}, {b}) is empty")
            norm.append((a, b))
        if norm[0][1] != norm[1][0] or norm[1][1] != norm[2][0]:
            raise SplitRangeError("split segments must be contiguous and ordered")
        object.__setattr__(self, "train", norm[0])
        object.__setattr__(self, "validation", norm[1])
        object.__setattr__(self, "test", norm[2])

    @property
    def span(self) -> tuple[int, int]:
        return (self.train[0], self.test[1])

    @classmethod
    def from_day_counts(
        cls, start, train_days: int = 52, validation_days: int = 7, test_days: int = 7
    ) -> "SplitSpec":
        """Default split shape: 52-day train, one-week validation and test."""
        t0 = round(to_epoch(start))
        t1 = t0 + train_days * DAY_SECONDS
        t2 = t1 + validation_days * DAY_SECONDS
        t3 = t2 + test_days * DAY_SECONDS
        return cls((t0, t1), (t1, t2), (t2, t3))

    @classmethod
    def from_inclusive_dates(cls, train, validation, test) -> "SplitSpec":
        """Build from (first day, last day) date pairs, last day included."""

        def seg(pair):
            a = round(to_epoch(pair[0]))
            b = round(to_epoch(pair[1])) + DAY_SECONDS
            return (a, b)

        return cls(seg(train), seg(validation), seg(test))


def bin_events(log: EventLog, window: tuple[float, float], bin_width: float = 1.0) -> BinnedSeries:
    """Count events per left-closed right-open bin across the window.

    Events outside the window are ignored; an event sitting exactly on the
    window end falls outside it.
    """
    w = width_seconds(bin_width)
    start, end = round(window[0]), round(window[1])
    if end <= start:
        raise EmptyWindowError(f"window [{start}, {end}) is empty")
    if start % w != 0 or end % w != 0:
        raise AlignmentError(f"window [{start}, {end}) is not aligned to the {w}s bin width")
    n = (end - start) // w
    edges = start + w * np.arange(n + 1, dtype=np.float64)
    pos = np.searchsorted(log.events, edges, side="left")
    counts = np.diff(pos).astype(np.float64)
    return BinnedSeries(start, counts, bin_width)


def split_series(series: BinnedSeries, spec: SplitSpec):
    """Slice a series into (train, validation, test) per the split spec.

    The three slices concatenate back to exactly the covered sub-series.
    """
    lo, hi = spec.span
    if lo < series.start or hi > series.end:
        raise SplitRangeError(
            f"split [{lo}, {hi}) is not contained in series [{series.start}, {series.end})"
        )
    return (
        series.window(*spec.train),
        series.window(*spec.validation),
        series.window(*spec.test),
    )
