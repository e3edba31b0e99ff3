"""Forecast ensembling by (weighted) pointwise averaging."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import BinnedSeries
from .errors import AlignmentError, ContractError


def _check_aligned(series: Sequence[BinnedSeries]) -> None:
    first = series[0]
    for other in series[1:]:
        if (
            other.start != first.start
            or other.bin_width != first.bin_width
            or len(other) != len(first)
        ):
            raise AlignmentError("ensemble components must share start, width, and length")


def combine(series: Sequence[BinnedSeries], weights: Optional[Sequence[float]] = None) -> BinnedSeries:
    """Weighted pointwise average; weights default to equal and must sum to 1."""
    if not series:
        raise ContractError("ensemble needs at least one component")
    _check_aligned(series)
    if weights is None:
        w = np.full(len(series), 1.0 / len(series))
    else:
        w = np.asarray(weights, dtype=np.float64)
        if w.size != len(series):
            raise ContractError("one weight per component required")
        if abs(float(w.sum()) - 1.0) > 1e-9:
            raise ContractError("weights must sum to 1")
    stacked = np.vstack([s.counts for s in series])
    return series[0].with_counts(w @ stacked)


def ensemble_average(a: BinnedSeries, b: BinnedSeries) -> BinnedSeries:
    """Equal-weight average of two aligned forecasts."""
    return combine([a, b])


@dataclass(frozen=True)
class EnsembleForecast:
    """Named component forecasts plus their weights."""

    components: tuple[tuple[str, BinnedSeries], ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        names_series = tuple((str(n), s) for n, s in self.components)
        object.__setattr__(self, "components", names_series)
        if not names_series:
            raise ContractError("ensemble needs at least one component")
        if len(self.weights) != len(names_series):
            raise ContractError("one weight per component required")
        _check_aligned([s for _, s in names_series])
        if abs(sum(self.weights) - 1.0) > 1e-9:
            raise ContractError("weights must sum to 1")

    @classmethod
    def equal_weight(cls, components: Sequence[tuple[str, BinnedSeries]]) -> "EnsembleForecast":
        n = len(components)
        return cls(tuple(components), tuple([1.0 / n] * n))

    def series(self) -> BinnedSeries:
        return combine([s for _, s in self.components], self.weights)
