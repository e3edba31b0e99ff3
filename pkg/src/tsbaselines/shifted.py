"""Persistence ("shifted") baseline: replay the immediate past as the forecast.

Two variants: a one-shot long-term forecast that copies the last S bins of
history forward, and a rolling short-term forecast that re-copies the previous
day of observed ground truth at every day boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DEFAULT_BLOCK, DEFAULT_HORIZON, LONG_TERM, SHORT_TERM, BinnedSeries
from .errors import AlignmentError, InsufficientHistoryError, ProtocolError


@dataclass(frozen=True)
class ShiftConfig:
    """Horizon and replay mode for the persistence baseline."""

    horizon: int = DEFAULT_HORIZON
    mode: str = LONG_TERM
    short_block: int = DEFAULT_BLOCK

    def __post_init__(self):
        if self.horizon < 1:
            raise ProtocolError("horizon must be at least one bin")
        if self.mode not in (LONG_TERM, SHORT_TERM):
            raise ProtocolError(f"unknown mode {self.mode!r}")
        if self.short_block < 1:
            raise ProtocolError("short_block must be at least one bin")
        if self.mode == SHORT_TERM and self.horizon % self.short_block:
            raise ProtocolError("short-term horizon must be a multiple of the block size")


def shifted_forecast(history: BinnedSeries, horizon: int) -> BinnedSeries:
    """Copy the last `horizon` bins of history forward as the forecast."""
    if horizon < 1:
        raise ProtocolError("horizon must be at least one bin")
    if len(history) < horizon:
        raise InsufficientHistoryError(
            f"need {horizon} bins of history, have {len(history)}"
        )
    return BinnedSeries(history.end, history.counts[-horizon:], history.bin_width)


def rolling_shifted_forecast(
    history: BinnedSeries, test_gt: BinnedSeries, block: int = DEFAULT_BLOCK
) -> BinnedSeries:
    """Predict each test block as the previous block of observed ground truth.

    Block 0 replays the last `block` bins of history; block j replays ground
    truth block j-1, so no bin of the block being predicted is ever consulted.
    """
    if block < 1:
        raise ProtocolError("block must be at least one bin")
    if len(test_gt) % block:
        raise ProtocolError(
            f"test length {len(test_gt)} is not a multiple of the {block}-bin block"
        )
    if len(history) < block:
        raise InsufficientHistoryError(f"need {block} bins of history, have {len(history)}")
    if history.end != test_gt.start or history.bin_width != test_gt.bin_width:
        raise AlignmentError("test ground truth must start where the history ends")
    values = np.concatenate([history.counts[-block:], test_gt.counts[: len(test_gt) - block]])
    return BinnedSeries(test_gt.start, values, test_gt.bin_width)
