"""Forecast-evaluation metrics over aligned (ground truth, forecast) pairs.

Six metrics: absolute percentage error on total volume, RMSE, symmetric MAPE,
dynamic time warping distance, volatility error, and skewness error. Metrics
that are undefined for a pair (zero ground-truth volume, too few bins, zero
variance) come back as None rather than a silent zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _backend
from .core import BinnedSeries
from .errors import AlignmentError

#: canonical metric order, also the CSV column order
METRIC_NAMES = ("ape", "rmse", "smape", "dtw", "volatility_error", "skewness_error")

#: short column names used in CSV artifacts
CSV_COLUMNS = {"volatility_error": "ve", "skewness_error": "ske"}


@dataclass(frozen=True)
class SeriesPair:
    """Aligned ground truth and forecast on the same bin grid."""

    gt: BinnedSeries
    fc: BinnedSeries

    def __post_init__(self):
        if (
            self.gt.start != self.fc.start
            or self.gt.bin_width != self.fc.bin_width
            or len(self.gt) != len(self.fc)
        ):
            raise AlignmentError("ground truth and forecast must share start, width, and length")

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return self.gt.counts, self.fc.counts


@dataclass(frozen=True)
class MetricVector:
    """All six metric values for one pair; None marks an undefined metric."""

    ape: Optional[float]
    rmse: Optional[float]
    smape: Optional[float]
    dtw: Optional[float]
    volatility_error: Optional[float]
    skewness_error: Optional[float]

    def value(self, name: str) -> Optional[float]:
        return getattr(self, name)

    def as_dict(self) -> dict[str, Optional[float]]:
        return {name: getattr(self, name) for name in METRIC_NAMES}

    def defined(self) -> tuple[str, ...]:
        return tuple(name for name in METRIC_NAMES if getattr(self, name) is not None)


def ape(pair: SeriesPair) -> Optional[float]:
    """Percentage error of the aggregated volume; None when GT volume is 0."""
    gt, fc = pair.arrays()
    total = float(np.sum(gt))
    if total <= 0:
        return None
    return abs(total - float(np.sum(fc))) / total * 100.0


def rmse(pair: SeriesPair) -> float:
    gt, fc = pair.arrays()
    return float(math.sqrt(np.mean((gt - fc) ** 2)))


def smape(pair: SeriesPair) -> float:
    """Symmetric MAPE in [0, 200]; 0/0 bins contribute 0."""
    gt, fc = pair.arrays()
    num = np.abs(gt - fc)
    den = np.abs(gt) + np.abs(fc)
    # each ratio is <= 1 exactly, so the mean can exceed 200 only by rounding
    ratios = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
    return float(min(200.0 * np.mean(ratios), 200.0))


def _max_scaled(x: np.ndarray) -> np.ndarray:
    top = float(np.max(x)) if x.size else 0.0
    return x / top if top > 0 else np.zeros_like(x)


def dtw_raw(x, y) -> float:
    """Unnormalized terminal warping cost with absolute-difference local cost."""
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.size == 0 or y.size == 0:
        raise AlignmentError("warping distance needs non-empty series")
    return float(_backend.dtw_cost(x, y))


def dtw(pair: SeriesPair) -> float:
    """Warping cost after per-series max scaling, divided by the length.

    Each series is divided by its own maximum (all-zero series stay zero), so
    the result is length-independent and lives in [0, 1].
    """
    gt, fc = pair.arrays()
    return dtw_raw(_max_scaled(gt), _max_scaled(fc)) / len(pair.gt)


def volatility_error(pair: SeriesPair) -> Optional[float]:
    """Absolute difference of sample standard deviations; None for n < 2."""
    gt, fc = pair.arrays()
    if gt.size < 2:
        return None
    return abs(float(np.std(gt, ddof=1)) - float(np.std(fc, ddof=1)))


def skewness_g1(x) -> Optional[float]:
    """Adjusted Fisher-Pearson standardized third moment.

    G1 = sqrt(n(n-1))/(n-2) * m3 / m2^(3/2) with biased central moments;
    None for n < 3 or zero variance.
    """
    x = np.asarray(x, dtype=np.float64).ravel()
    n = x.size
    if n < 3:
        return None
    centered = x - np.mean(x)
    m2 = float(np.mean(centered**2))
    if m2 <= 0:
        return None
    m3 = float(np.mean(centered**3))
    return math.sqrt(n * (n - 1)) / (n - 2) * m3 / m2**1.5


def skewness_error(pair: SeriesPair) -> Optional[float]:
    """Absolute difference of the two G1 coefficients; None if either is."""
    gt, fc = pair.arrays()
    g_gt = skewness_g1(gt)
    g_fc = skewness_g1(fc)
    if g_gt is None or g_fc is None:
        return None
    return abs(g_gt - g_fc)


def evaluate_pair(pair: SeriesPair) -> MetricVector:
    """All six metrics for one pair."""
    return MetricVector(
        ape=ape(pair),
        rmse=rmse(pair),
        smape=smape(pair),
        dtw=dtw(pair),
        volatility_error=volatility_error(pair),
        skewness_error=skewness_error(pair),
    )


def csv_header() -> list[str]:
    return ["domain", "platform", "topic", "model"] + [
        CSV_COLUMNS.get(name, name) for name in METRIC_NAMES
    ]


def csv_row(domain: str, platform: str, topic: str, model: str, vector: MetricVector) -> list[str]:
    """Serialized row with NA for undefined metrics."""
    cells = [domain, platform, topic, model]
    for name in METRIC_NAMES:
        v = vector.value(name)
        cells.append("NA" if v is None else repr(v))
    return cells
