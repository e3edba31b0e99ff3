import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tsbaselines.core import (
    DAY_SECONDS,
    BinnedSeries,
    EventLog,
    SplitSpec,
    bin_events,
    split_series,
    to_epoch,
    to_iso,
)
from tsbaselines.errors import AlignmentError, DataError, EmptyWindowError, SplitRangeError

from conftest import HOUR, hourly


class TestEventLog:
    def test_sorts_on_construction(self):
        log = EventLog(np.array([30.0, 10.0, 20.0]))
        assert list(log.events) == [10.0, 20.0, 30.0]

    def test_rejects_non_finite(self):
        with pytest.raises(DataError):
            EventLog(np.array([1.0, np.nan]))

    def test_events_are_read_only(self):
        log = EventLog(np.array([1.0, 2.0]))
        with pytest.raises(ValueError):
            log.events[0] = 5.0


class TestBinEvents:
    def test_basic_example(self):
        # events at 00:10, 00:50, 01:20 in a 2h window
        log = EventLog(np.array([600.0, 3000.0, 4800.0]))
        series = bin_events(log, (0, 2 * HOUR), 1.0)
        assert list(series.counts) == [2.0, 1.0]

    def test_empty_log(self):
        series = bin_events(EventLog(np.array([])), (0, 3 * HOUR), 1.0)
        assert list(series.counts) == [0.0, 0.0, 0.0]

    def test_window_edges_are_right_open(self):
        log = EventLog(np.array([0.0, float(HOUR), float(2 * HOUR)]))
        series = bin_events(log, (0, 2 * HOUR), 1.0)
        # the event exactly on the window end is excluded
        assert list(series.counts) == [1.0, 1.0]

    def test_events_outside_window_ignored(self):
        log = EventLog(np.array([-5.0, 100.0, 999999.0]))
        series = bin_events(log, (0, HOUR), 1.0)
        assert series.counts.sum() == 1.0

    def test_66_day_window_and_table_split(self):
        start = to_epoch("2018-12-24T00:00:00Z")
        end = start + 66 * DAY_SECONDS
        series = bin_events(EventLog(np.array([])), (start, end), 1.0)
        assert len(series) == 1584
        spec = SplitSpec.from_day_counts(start)
        train, val, test = split_series(series, spec)
        assert (len(train), len(val), len(test)) == (1248, 168, 168)

    def test_unaligned_window(self):
        with pytest.raises(AlignmentError):
            bin_events(EventLog(np.array([])), (30, HOUR + 30), 1.0)

    def test_empty_window(self):
        with pytest.raises(EmptyWindowError):
            bin_events(EventLog(np.array([])), (HOUR, HOUR), 1.0)

    @given(st.lists(st.integers(min_value=0, max_value=5 * HOUR - 1), max_size=60))
    def test_permutation_invariance_and_totals(self, raw):
        times = np.array(raw, dtype=float)
        shuffled = times[::-1]
        a = bin_events(EventLog(times), (0, 5 * HOUR), 1.0)
        b = bin_events(EventLog(shuffled), (0, 5 * HOUR), 1.0)
        assert np.array_equal(a.counts, b.counts)
        assert a.counts.sum() == len(times)


class TestBinnedSeries:
    def test_rejects_negative_counts(self):
        with pytest.raises(DataError):
            hourly([1.0, -0.5])

    def test_rejects_empty(self):
        with pytest.raises(DataError):
            hourly([])

    def test_rejects_misaligned_start(self):
        with pytest.raises(AlignmentError):
            BinnedSeries(30, np.array([1.0]), 1.0)

    def test_end_and_window(self):
        s = hourly([1, 2, 3, 4])
        assert s.end == 4 * HOUR
        sub = s.window(HOUR, 3 * HOUR)
        assert sub.start == HOUR and list(sub.counts) == [2.0, 3.0]

    def test_window_out_of_range(self):
        with pytest.raises(SplitRangeError):
            hourly([1, 2]).window(0, 5 * HOUR)


class TestSplit:
    def test_ten_bin_slicing(self):
        series = hourly(range(10))
        spec = SplitSpec((0, 6 * HOUR), (6 * HOUR, 8 * HOUR), (8 * HOUR, 10 * HOUR))
        train, val, test = split_series(series, spec)
        assert (len(train), len(val), len(test)) == (6, 2, 2)
        assert list(test.counts) == [8.0, 9.0]

    def test_round_trip_concatenation(self):
        series = hourly(np.arange(24))
        spec = SplitSpec((0, 12 * HOUR), (12 * HOUR, 18 * HOUR), (18 * HOUR, 24 * HOUR))
        parts = split_series(series, spec)
        rebuilt = np.concatenate([p.counts for p in parts])
        assert np.array_equal(rebuilt, series.counts)
        assert parts[0].start == series.start
        assert parts[2].end == series.end

    def test_empty_validation_rejected(self):
        with pytest.raises(SplitRangeError):
            SplitSpec((0, 5 * HOUR), (5 * HOUR, 5 * HOUR), (5 * HOUR, 10 * HOUR))

    def test_non_contiguous_rejected(self):
        with pytest.raises(SplitRangeError):
            SplitSpec((0, 2 * HOUR), (3 * HOUR, 4 * HOUR), (4 * HOUR, 5 * HOUR))

    def test_spec_outside_series(self):
        series = hourly(range(4))
        spec = SplitSpec((0, 2 * HOUR), (2 * HOUR, 4 * HOUR), (4 * HOUR, 6 * HOUR))
        with pytest.raises(SplitRangeError):
            split_series(series, spec)

    def test_from_inclusive_dates(self):
        spec = SplitSpec.from_inclusive_dates(
            ("2020-01-01", "2020-01-08"), ("2020-01-09", "2020-01-09"), ("2020-01-10", "2020-01-10")
        )
        assert spec.train[1] - spec.train[0] == 8 * DAY_SECONDS
        assert spec.validation[1] - spec.validation[0] == DAY_SECONDS


class TestTimeCodec:
    def test_iso_round_trip(self):
        assert to_iso(to_epoch("2019-02-22T05:00:00Z")) == "2019-02-22T05:00:00Z"

    def test_naive_treated_as_utc(self):
        assert to_epoch("2019-02-22T00:00:00") == to_epoch("2019-02-22T00:00:00Z")
