"""Forecasting baselines and a benchmark harness for hourly event streams.

Four baseline families (persistence, ARIMA, self-exciting point process, and
their average), six evaluation metrics, and a normalized cross-model
comparison pipeline, driven by a reproducible experiment harness.
"""

from ._backend import BACKEND
from .arima import ArimaModel, ArimaOrder, fit_arima, forecast_arima, grid_search_arima
from .core import (
    BinnedSeries,
    EventLog,
    SplitSpec,
    bin_events,
    split_series,
)
from .ensemble import EnsembleForecast, combine, ensemble_average
from .evaluation import (
    ModelErrorTable,
    OnmeReport,
    make_report,
    normalize_errors,
    onme,
    onme_summary,
    percent_improvement,
)
from .hawkes import (
    HawkesFit,
    HawkesParams,
    SimulationPlan,
    fit_hawkes_em,
    hawkes_forecast,
    hawkes_intensity,
    hawkes_loglik,
    simulate_hawkes,
)
from .metrics import MetricVector, SeriesPair, evaluate_pair
from .shifted import ShiftConfig, rolling_shifted_forecast, shifted_forecast

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ArimaModel",
    "ArimaOrder",
    "BinnedSeries",
    "EnsembleForecast",
    "EventLog",
    "HawkesFit",
    "HawkesParams",
    "MetricVector",
    "ModelErrorTable",
    "OnmeReport",
    "SeriesPair",
    "ShiftConfig",
    "SimulationPlan",
    "SplitSpec",
    "bin_events",
    "combine",
    "ensemble_average",
    "evaluate_pair",
    "fit_arima",
    "fit_hawkes_em",
    "forecast_arima",
    "grid_search_arima",
    "hawkes_forecast",
    "hawkes_intensity",
    "hawkes_loglik",
    "make_report",
    "normalize_errors",
    "onme",
    "onme_summary",
    "percent_improvement",
    "rolling_shifted_forecast",
    "shifted_forecast",
    "simulate_hawkes",
    "split_series",
]
