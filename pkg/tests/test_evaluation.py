import math

import numpy as np
import pytest

from tsbaselines.errors import ContractError, CoverageError, DataError
from tsbaselines.evaluation import (
    HeatmapCell,
    ModelErrorTable,
    OnmeReport,
    improvement_cells,
    make_report,
    normalize_errors,
    onme,
    onme_summary,
    percent_improvement,
)
from tsbaselines.metrics import METRIC_NAMES, MetricVector

MODELS = ("arima", "hawkes", "shifted", "hawkes+arima")


def vector(**overrides) -> MetricVector:
    values = {name: 1.0 for name in METRIC_NAMES}
    values.update(overrides)
    return MetricVector(**values)


def table_from_metric(name, values) -> ModelErrorTable:
    rows = {model: vector(**{name: v}) for model, v in zip(MODELS, values)}
    return ModelErrorTable(("ctx", "site"), rows)


class TestNormalize:
    def test_published_ape_shares(self):
        table = table_from_metric("ape", [35.54, 74.61, 67.88, 55.07])
        shares = normalize_errors(table)["ape"]
        expected = {"arima": 0.1525, "hawkes": 0.3201, "shifted": 0.2912, "hawkes+arima": 0.2363}
        for model, value in expected.items():
            assert shares[model] == pytest.approx(value, abs=0.0005)

    def test_equal_errors_split_evenly(self):
        shares = normalize_errors(table_from_metric("rmse", [5, 5, 5, 5]))["rmse"]
        assert all(v == pytest.approx(0.25) for v in shares.values())

    def test_zero_error_model_gets_zero_share(self):
        shares = normalize_errors(table_from_metric("dtw", [0.0, 1.0, 2.0, 1.0]))["dtw"]
        assert shares["arima"] == 0.0

    def test_undefined_metric_dropped_group_wide(self):
        rows = {m: vector() for m in MODELS[:3]}
        rows["hawkes+arima"] = vector(skewness_error=None)
        normalized = normalize_errors(ModelErrorTable(("g",), rows))
        assert "skewness_error" not in normalized
        assert set(normalized) == set(METRIC_NAMES) - {"skewness_error"}

    def test_zero_column_dropped(self):
        table = table_from_metric("smape", [0.0, 0.0, 0.0, 0.0])
        normalized = normalize_errors(table)
        assert "smape" not in normalized

    def test_shares_sum_to_one(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            values = rng.uniform(0.01, 100, size=4)
            shares = normalize_errors(table_from_metric("rmse", values))["rmse"]
            assert sum(shares.values()) == pytest.approx(1.0, abs=1e-12)

    def test_unknown_metric_selector(self):
        with pytest.raises(ContractError):
            normalize_errors(table_from_metric("ape", [1, 2, 3, 4]), metrics=["nope"])

    def test_needs_two_models(self):
        with pytest.raises(ContractError):
            ModelErrorTable(("g",), {"only": vector()})


class TestOnme:
    def test_published_arima_row(self):
        normalized = {
            name: {"arima": share}
            for name, share in zip(
                METRIC_NAMES, [0.1525, 0.2235, 0.2325, 0.2038, 0.2548, 0.3971]
            )
        }
        # needs >= 2 models for a table, but onme itself averages whatever is given
        result = onme(normalized)
        assert result["arima"] == pytest.approx(0.244, abs=0.0005)

    def test_uniform_shares(self):
        normalized = {name: {m: 0.25 for m in MODELS} for name in METRIC_NAMES}
        assert all(v == pytest.approx(0.25) for v in onme(normalized).values())

    def test_sums_to_one_across_models(self):
        rng = np.random.default_rng(1)
        rows = {
            m: vector(**{name: rng.uniform(0.1, 9) for name in METRIC_NAMES}) for m in MODELS
        }
        report = make_report(ModelErrorTable(("g",), rows))
        assert sum(report.onme.values()) == pytest.approx(1.0, abs=1e-9)

    def test_empty_rejected(self):
        with pytest.raises(ContractError):
            onme({})

    def test_scaling_one_metric_leaves_onme_unchanged(self):
        rng = np.random.default_rng(2)
        rows = {
            m: vector(**{name: rng.uniform(0.1, 9) for name in METRIC_NAMES}) for m in MODELS
        }
        base = make_report(ModelErrorTable(("g",), rows)).onme
        scaled_rows = {
            m: vector(
                **{
                    name: rows[m].value(name) * (7.3 if name == "rmse" else 1.0)
                    for name in METRIC_NAMES
                }
            )
            for m in MODELS
        }
        scaled = make_report(ModelErrorTable(("g",), scaled_rows)).onme
        for m in MODELS:
            assert scaled[m] == pytest.approx(base[m], abs=1e-12)


class TestSummary:
    def test_published_all_domain_rows(self):
        onmes = {
            "arima": [0.244, 0.2272, 0.3637, 0.3087, 0.3536, 0.3682],
            "hawkes": [0.2307, 0.2811, 0.2001, 0.2493, 0.2183, 0.2413],
            "shifted": [0.2848, 0.2352, 0.1702, 0.2083, 0.2249, 0.19],
            "hawkes+arima": [0.2405, 0.2565, 0.266, 0.2337, 0.2032, 0.2004],
        }
        reports = [
            OnmeReport(("g", str(i)), {}, {m: onmes[m][i] for m in onmes}) for i in range(6)
        ]
        summary = onme_summary(reports)
        assert summary["arima"] == pytest.approx(0.3109, abs=0.0005)
        assert summary["hawkes"] == pytest.approx(0.2368, abs=0.0005)
        assert summary["shifted"] == pytest.approx(0.2189, abs=0.0005)
        assert summary["hawkes+arima"] == pytest.approx(0.2334, abs=0.0005)

    def test_single_group_identity(self):
        report = OnmeReport(("g",), {}, {"a": 0.4, "b": 0.6})
        assert onme_summary([report]) == {"a": 0.4, "b": 0.6}

    def test_model_coverage_enforced(self):
        r1 = OnmeReport(("g1",), {}, {"a": 0.5, "b": 0.5})
        r2 = OnmeReport(("g2",), {}, {"a": 1.0})
        with pytest.raises(CoverageError):
            onme_summary([r1, r2])


class TestPercentImprovement:
    def test_halved_error(self):
        assert percent_improvement(10.0, 5.0) == pytest.approx(50.0)

    def test_equal_errors(self):
        assert percent_improvement(3.3, 3.3) == 0.0

    def test_base_perfect_sentinel(self):
        assert percent_improvement(0.0, 1.0) == float("-inf")

    def test_both_perfect(self):
        assert percent_improvement(0.0, 0.0) == 0.0

    def test_negative_rejected(self):
        with pytest.raises(DataError):
            percent_improvement(-1.0, 2.0)

    def test_worse_challenger_is_negative(self):
        assert percent_improvement(5.0, 10.0) == pytest.approx(-100.0)


class TestHeatmapCells:
    def test_win_counting_on_constructed_grid(self):
        # 15 topics x 6 metrics with exactly 66 wins
        rng = np.random.default_rng(3)
        per_topic = {}
        wins_wanted = iter([True] * 66 + [False] * 24)
        for t in range(15):
            base_vals, chal_vals = {}, {}
            for name in METRIC_NAMES:
                if next(wins_wanted):
                    base_vals[name], chal_vals[name] = 2.0, 1.0
                else:
                    base_vals[name], chal_vals[name] = 1.0, 2.0
            per_topic[f"topic{t:02d}"] = (vector(**base_vals), vector(**chal_vals))
        cells = improvement_cells(per_topic)
        assert len(cells) == 90
        assert sum(c.win for c in cells) == 66

    def test_undefined_cells_skipped(self):
        per_topic = {"t": (vector(skewness_error=None), vector())}
        cells = improvement_cells(per_topic)
        assert len(cells) == len(METRIC_NAMES) - 1
        assert all(c.metric != "skewness_error" for c in cells)

    def test_zero_improvement_is_not_a_win(self):
        cells = improvement_cells({"t": (vector(), vector())})
        assert all(not c.win and c.value == 0.0 for c in cells)
