import numpy as np
import pytest

from tsbaselines.core import BinnedSeries

HOUR = 3600


def hourly(values, start=0) -> BinnedSeries:
    """Shorthand for a 1-hour-bin series used across the suite."""
    return BinnedSeries(start, np.asarray(values, dtype=np.float64), 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
