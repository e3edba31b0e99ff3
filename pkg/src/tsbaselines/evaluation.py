"""Cross-model comparison: normalized errors, their per-model average, and
percent-improvement heatmap data.

For a group of models scored on the same series, each metric value is divided
by the sum of that metric over all models, giving per-metric shares that sum
to 1. Averaging a model's shares across metrics gives its overall normalized
metric error; lower means the model took a smaller slice of the group's total
error.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .errors import ContractError, CoverageError, DataError
from .metrics import METRIC_NAMES, MetricVector

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModelErrorTable:
    """Raw metric vectors for >= 2 models scored on one group."""

    group: tuple[str, ...]
    rows: dict[str, MetricVector]

    def __post_init__(self):
        if len(self.rows) < 2:
            raise ContractError("cross-model comparison needs at least two models")

    @property
    def models(self) -> tuple[str, ...]:
        return tuple(self.rows)


def normalize_errors(
    table: ModelErrorTable, metrics: Optional[Sequence[str]] = None
) -> dict[str, dict[str, float]]:
    """Per-metric error shares: value / sum over models.

    A metric undefined for any model is dropped for the whole group, as is a
    metric whose column sums to zero; both are logged.
    """
    wanted = tuple(metrics) if metrics is not None else METRIC_NAMES
    unknown = set(wanted) - set(METRIC_NAMES)
    if unknown:
        raise ContractError(f"unknown metrics: {sorted(unknown)}")
    normalized: dict[str, dict[str, float]] = {}
    for name in wanted:
        values = {model: vec.value(name) for model, vec in table.rows.items()}
        if any(v is None for v in values.values()):
            log.warning("metric %s undefined for some model in %s; excluded", name, table.group)
            continue
        total = sum(values.values())
        if total <= 0:
            log.warning("metric %s sums to zero in %s; excluded", name, table.group)
            continue
        normalized[name] = {model: v / total for model, v in values.items()}
    return normalized


def onme(normalized: Mapping[str, Mapping[str, float]]) -> dict[str, float]:
    """Average each model's shares over the defined metrics."""
    if not normalized:
        raise ContractError("need at least one defined metric")
    metric_names = list(normalized)
    models = list(normalized[metric_names[0]])
    for name in metric_names[1:]:
        if list(normalized[name]) != models:
            raise ContractError("metrics must cover the same models")
    return {
        model: sum(normalized[name][model] for name in metric_names) / len(metric_names)
        for model in models
    }


@dataclass(frozen=True)
class OnmeReport:
    """Normalized errors and their per-model averages for one group."""

    group: tuple[str, ...]
    normalized: dict[str, dict[str, float]]
    onme: dict[str, float]


def make_report(table: ModelErrorTable, metrics: Optional[Sequence[str]] = None) -> OnmeReport:
    normalized = normalize_errors(table, metrics)
    return OnmeReport(table.group, normalized, onme(normalized))


def onme_summary(reports: Sequence[OnmeReport]) -> dict[str, float]:
    """Unweighted mean of the per-group averages, per model."""
    if not reports:
        raise ContractError("need at least one group report")
    models = list(reports[0].onme)
    for report in reports[1:]:
        if set(report.onme) != set(models):
            raise CoverageError(
                f"group {report.group} covers models {sorted(report.onme)}, "
                f"expected {sorted(models)}"
            )
    return {m: sum(r.onme[m] for r in reports) / len(reports) for m in models}


def percent_improvement(err_base: float, err_challenger: float) -> float:
    """How much smaller (in %) the challenger's error is than the base's.

    Positive means the challenger wins. A perfect base against a fallible
    challenger yields -inf (the "base-perfect" sentinel); two perfect models
    tie at 0.
    """
    if err_base < 0 or err_challenger < 0:
        raise DataError("errors must be non-negative")
    if err_base == 0:
        return 0.0 if err_challenger == 0 else float("-inf")
    return (err_base - err_challenger) / err_base * 100.0


@dataclass(frozen=True)
class HeatmapCell:
    """One (topic, metric) comparison of a challenger against a base model."""

    topic: str
    metric: str
    value: float
    win: bool


def improvement_cells(
    per_topic: Mapping[str, tuple[MetricVector, MetricVector]]
) -> list[HeatmapCell]:
    """Percent-improvement grid from {topic: (base, challenger)} vectors.

    Cells where either side is undefined are skipped; a cell is a win iff the
    improvement is strictly positive.
    """
    cells = []
    for topic, (base, challenger) in per_topic.items():
        for name in METRIC_NAMES:
            b = base.value(name)
            c = challenger.value(name)
            if b is None or c is None:
                continue
            value = percent_improvement(b, c)
            cells.append(HeatmapCell(topic, name, value, value > 0))
    return cells
