import numpy as np
import pytest

from tsbaselines.errors import AlignmentError, InsufficientHistoryError, ProtocolError
from tsbaselines.metrics import SeriesPair, evaluate_pair
from tsbaselines.shifted import ShiftConfig, rolling_shifted_forecast, shifted_forecast

from conftest import HOUR, hourly


class TestShiftedForecast:
    def test_full_week_replay(self):
        history = hourly(range(1, 169))
        fc = shifted_forecast(history, 168)
        assert np.array_equal(fc.counts, history.counts)
        assert fc.start == history.end

    def test_tail_copy(self):
        fc = shifted_forecast(hourly([5, 7, 9, 11]), 2)
        assert list(fc.counts) == [9.0, 11.0]

    def test_insufficient_history(self):
        with pytest.raises(InsufficientHistoryError):
            shifted_forecast(hourly([1, 2, 3]), 4)

    def test_output_values_come_from_history(self):
        history = hourly([3, 1, 4, 1, 5, 9, 2, 6])
        fc = shifted_forecast(history, 5)
        hist_values = list(history.counts)
        for v in fc.counts:
            assert v in hist_values

    def test_double_shift_matches_shifting_the_shifted(self):
        history = hourly([2, 7, 1, 8, 2, 8])
        once = shifted_forecast(history, 3)
        twice = shifted_forecast(once, 3)
        assert np.array_equal(twice.counts, once.counts)
        assert twice.start == once.end

    def test_constant_history_scores_zero_on_defined_metrics(self):
        history = hourly([4.0] * 10)
        fc = shifted_forecast(history, 4)
        gt = hourly([4.0] * 4, start=history.end)
        vec = evaluate_pair(SeriesPair(gt, fc))
        assert vec.ape == 0 and vec.rmse == 0 and vec.smape == 0 and vec.dtw == 0
        assert vec.volatility_error == 0
        # zero-variance series leave skewness undefined, flagged rather than 0
        assert vec.skewness_error is None


class TestRollingShifted:
    def test_two_block_protocol(self):
        history = hourly([9, 9, 1, 2])  # ends with [1, 2]
        test_gt = hourly([3, 4, 5, 6], start=history.end)
        fc = rolling_shifted_forecast(history, test_gt, block=2)
        assert list(fc.counts) == [1.0, 2.0, 3.0, 4.0]
        assert fc.start == test_gt.start

    def test_lagged_gt_gives_zero_error(self):
        history = hourly([1, 2])
        test_gt = hourly([1, 2, 1, 2, 1, 2], start=history.end)
        fc = rolling_shifted_forecast(history, test_gt, block=2)
        assert np.array_equal(fc.counts, test_gt.counts)

    def test_week_of_daily_blocks(self, rng):
        history = hourly(rng.integers(0, 50, size=240))
        gt_values = rng.integers(0, 50, size=168).astype(float)
        test_gt = hourly(gt_values, start=history.end)
        fc = rolling_shifted_forecast(history, test_gt, block=24)
        assert len(fc) == 168
        assert np.array_equal(fc.counts[:24], history.counts[-24:])
        for day in range(1, 7):
            assert np.array_equal(
                fc.counts[day * 24 : (day + 1) * 24], gt_values[(day - 1) * 24 : day * 24]
            )

    def test_non_multiple_length_rejected(self):
        history = hourly([1] * 24)
        test_gt = hourly([1] * 25, start=history.end)
        with pytest.raises(ProtocolError):
            rolling_shifted_forecast(history, test_gt, block=24)

    def test_single_block_degenerates_to_plain_shift(self):
        history = hourly([4, 5, 6, 7])
        test_gt = hourly([0, 0], start=history.end)
        rolled = rolling_shifted_forecast(history, test_gt, block=2)
        plain = shifted_forecast(history, 2)
        assert np.array_equal(rolled.counts, plain.counts)

    def test_misaligned_gt_rejected(self):
        history = hourly([1, 2, 3])
        test_gt = hourly([1, 2], start=history.end + HOUR)
        with pytest.raises(AlignmentError):
            rolling_shifted_forecast(history, test_gt, block=1)

    def test_no_lookahead_within_blocks(self, rng):
        """Perturbing ground truth at or past block j leaves blocks <= j alone."""
        history = hourly(rng.integers(0, 9, size=48))
        base = rng.integers(0, 9, size=72).astype(float)
        perturbed = base.copy()
        perturbed[48:] += 100
        fc_a = rolling_shifted_forecast(history, hourly(base, start=history.end), block=24)
        fc_b = rolling_shifted_forecast(history, hourly(perturbed, start=history.end), block=24)
        # only the final block's ground truth changed, and no forecast block reads it
        assert np.array_equal(fc_a.counts, fc_b.counts)


class TestShiftConfig:
    def test_short_term_requires_block_multiple(self):
        with pytest.raises(ProtocolError):
            ShiftConfig(horizon=30, mode="short_term", short_block=24)

    def test_defaults(self):
        cfg = ShiftConfig()
        assert cfg.horizon == 168 and cfg.short_block == 24
