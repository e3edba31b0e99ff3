"""Experiment orchestration: ingestion, per-(topic, model) execution,
artifact persistence, and report emission.

A run bins every configured event stream over the split span, fits and
forecasts each configured model on the test window under the chosen protocol,
scores all metrics per topic, aggregates per (domain, platform) group for the
normalized cross-model comparison, and writes every artifact as CSV/SVG/JSON
under the output directory. All randomness derives from the single config
seed, so a rerun with the same config is byte-identical on CSV artifacts.
"""

from __future__ import annotations

import concurrent.futures
import hashlib
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import arima as arima_mod
from . import hawkes as hawkes_mod
from ._backend import BACKEND
from .core import (
    DAY_SECONDS,
    DEFAULT_BLOCK,
    LONG_TERM,
    SHORT_TERM,
    BinnedSeries,
    EventLog,
    SplitSpec,
    bin_events,
    split_series,
    to_epoch,
    to_iso,
)
from .ensemble import combine
from .errors import ConfigError, DataError, TsBaselinesError
from .evaluation import (
    HeatmapCell,
    ModelErrorTable,
    OnmeReport,
    improvement_cells,
    make_report,
    onme_summary,
)
from .io import fmt_count, read_events_jsonl, write_csv, write_series_csv
from .metrics import (
    CSV_COLUMNS,
    METRIC_NAMES,
    MetricVector,
    SeriesPair,
    csv_header,
    csv_row,
    evaluate_pair,
)
from .plots import render_heatmap_svg, render_overlay_svg
from .shifted import rolling_shifted_forecast, shifted_forecast

log = logging.getLogger(__name__)

MODEL_TYPES = ("shifted", "arima", "hawkes", "ensemble")

STAGES = ("ingest", "fit", "forecast", "evaluate", "report", "run")


@dataclass(frozen=True)
class DatasetSpec:
    domain: str
    platform: str
    path: str
    topics: Optional[tuple[str, ...]] = None


@dataclass(frozen=True)
class ModelSpec:
    name: str
    type: str
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.type not in MODEL_TYPES:
            raise ConfigError(f"unknown model type {self.type!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    datasets: tuple[DatasetSpec, ...]
    models: tuple[ModelSpec, ...]
    output_dir: str
    split: Optional[SplitSpec] = None
    split_start: Optional[float] = None
    split_days: tuple[int, int, int] = (52, 7, 7)
    bin_width: float = 1.0
    protocol: str = LONG_TERM
    block: int = DEFAULT_BLOCK
    metrics: Optional[tuple[str, ...]] = None
    seed: int = 0
    strict: bool = False
    workers: int = 1

    def __post_init__(self):
        if not self.datasets:
            raise ConfigError("at least one dataset is required")
        if len(self.models) < 2:
            raise ConfigError("comparison requires at least two models")
        names = [m.name for m in self.models]
        if len(set(names)) != len(names):
            raise ConfigError("model names must be unique")
        if self.protocol not in (LONG_TERM, SHORT_TERM):
            raise ConfigError(f"protocol must be long_term or short_term, got {self.protocol!r}")
        if self.metrics is not None:
            unknown = set(self.metrics) - set(METRIC_NAMES)
            if unknown:
                raise ConfigError(f"unknown metrics {sorted(unknown)}")
        seen = set()
        for m in self.models:
            if m.type == "ensemble":
                comps = m.options.get("components")
                if not comps or len(comps) < 2:
                    raise ConfigError(f"ensemble {m.name!r} needs at least two components")
                missing = [c for c in comps if c not in seen]
                if missing:
                    raise ConfigError(
                        f"ensemble {m.name!r} references {missing}; components must be "
                        f"defined earlier in the model list"
                    )
            seen.add(m.name)


@dataclass
class TaskRecord:
    domain: str
    platform: str
    topic: str
    model: str
    status: str = "ok"
    error: Optional[str] = None
    seconds: float = 0.0
    artifacts: list[str] = field(default_factory=list)

    @property
    def key(self):
        return (self.domain, self.platform, self.topic, self.model)


@dataclass
class RunManifest:
    config_hash: str
    backend: str
    protocol: str
    stage: str
    tasks: list[TaskRecord] = field(default_factory=list)
    groups: list[dict] = field(default_factory=list)
    artifacts: list[str] = field(default_factory=list)

    @property
    def failed(self) -> bool:
        return any(t.status != "ok" for t in self.tasks) or any(
            g.get("status") != "ok" for g in self.groups
        )

    def to_json(self) -> str:
        doc = {
            "config_hash": self.config_hash,
            "backend": self.backend,
            "protocol": self.protocol,
            "stage": self.stage,
            "tasks": [vars(t) for t in self.tasks],
            "groups": self.groups,
            "artifacts": self.artifacts,
        }
        return json.dumps(doc, indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# configuration loading


def _load_toml(path) -> dict:
    try:
        import tomllib
    except ModuleNotFoundError:
        import tomli as tomllib
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def load_config(path, **overrides) -> ExperimentConfig:
    """Parse a TOML experiment config; keyword overrides win."""
    try:
        doc = _load_toml(path)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except Exception as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc

    base = Path(path).parent

    datasets = []
    for entry in doc.get("datasets", []):
        try:
            datasets.append(
                DatasetSpec(
                    domain=str(entry["domain"]),
                    platform=str(entry["platform"]),
                    path=str((base / entry["path"]).resolve()),
                    topics=tuple(entry["topics"]) if "topics" in entry else None,
                )
            )
        except KeyError as exc:
            raise ConfigError(f"dataset entry missing field {exc}") from exc

    models = []
    for entry in doc.get("models", []):
        entry = dict(entry)
        try:
            name = str(entry.pop("name"))
            mtype = str(entry.pop("type"))
        except KeyError as exc:
            raise ConfigError(f"model entry missing field {exc}") from exc
        models.append(ModelSpec(name=name, type=mtype, options=entry))

    split = None
    split_start = None
    split_days = (52, 7, 7)
    if "split" in doc:
        sp = doc["split"]
        if "train" in sp:
            try:
                split = SplitSpec.from_inclusive_dates(sp["train"], sp["validation"], sp["test"])
            except (KeyError, TsBaselinesError) as exc:
                raise ConfigError(f"bad explicit split: {exc}") from exc
        else:
            split_days = (
                int(sp.get("train_days", 52)),
                int(sp.get("validation_days", 7)),
                int(sp.get("test_days", 7)),
            )
            if "start" in sp:
                split_start = to_epoch(sp["start"])

    protocol = {"long": LONG_TERM, "short": SHORT_TERM}.get(
        doc.get("protocol", "long"), doc.get("protocol")
    )

    kwargs = dict(
        datasets=tuple(datasets),
        models=tuple(models),
        output_dir=str(doc.get("output_dir", "out")),
        split=split,
        split_start=split_start,
        split_days=split_days,
        bin_width=float(doc.get("bin_width_hours", 1.0)),
        protocol=protocol,
        block=int(doc.get("block", DEFAULT_BLOCK)),
        metrics=tuple(doc["metrics"]) if "metrics" in doc else None,
        seed=int(doc.get("seed", 0)),
        strict=bool(doc.get("strict", False)),
        workers=int(doc.get("workers", 1)),
    )
    kwargs.update(overrides)
    try:
        return ExperimentConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def config_hash(config: ExperimentConfig) -> str:
    doc = {
        "datasets": [vars(d) for d in config.datasets],
        "models": [(m.name, m.type, m.options) for m in config.models],
        "split": None if config.split is None else vars(config.split),
        "split_start": config.split_start,
        "split_days": config.split_days,
        "bin_width": config.bin_width,
        "protocol": config.protocol,
        "block": config.block,
        "metrics": config.metrics,
        "seed": config.seed,
    }
    blob = json.dumps(doc, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()


def _stable_int(text: str) -> int:
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big")


def task_seed(config_seed: int, *key: str) -> np.random.SeedSequence:
    """Per-task stream derived from the single config seed."""
    return np.random.SeedSequence([int(config_seed)] + [_stable_int(k) for k in key])


# ---------------------------------------------------------------------------
# ingestion


def ingest(paths: Sequence, strict: bool = False):
    """Read JSON Lines event files into EventLogs keyed by stream.

    Returns ({(domain, platform, topic): EventLog}, malformed line count).
    Lenient mode skips malformed lines; strict mode raises on the first.
    """
    grouped: dict[tuple[str, str, str], list[float]] = {}
    malformed = 0
    for path in paths:
        if not Path(path).exists():
            raise DataError(f"event file not found: {path}")
        records, bad = read_events_jsonl(path, strict=strict)
        malformed += bad
        for rec in records:
            key = (rec["domain"], rec["platform"], rec["topic"])
            grouped.setdefault(key, []).append(rec["timestamp"])
    logs = {
        key: EventLog(np.asarray(times), domain=key[0], platform=key[1], topic=key[2])
        for key, times in grouped.items()
    }
    if malformed:
        log.warning("ingest skipped %d malformed lines", malformed)
    return logs, malformed


def load_datasets(config: ExperimentConfig):
    """EventLogs for every configured stream, honoring topic filters."""
    logs: dict[tuple[str, str, str], EventLog] = {}
    malformed = 0
    for ds in config.datasets:
        all_logs, bad = ingest([ds.path], strict=config.strict)
        malformed += bad
        matching = {
            k: v for k, v in all_logs.items() if k[0] == ds.domain and k[1] == ds.platform
        }
        if ds.topics is not None:
            for topic in ds.topics:
                key = (ds.domain, ds.platform, topic)
                if key not in matching or len(matching[key]) == 0:
                    raise DataError(
                        f"no events for configured topic {topic!r} in {ds.path} "
                        f"({ds.domain}/{ds.platform})"
                    )
            matching = {k: v for k, v in matching.items() if k[2] in ds.topics}
        if not matching:
            raise DataError(f"{ds.path} holds no events for {ds.domain}/{ds.platform}")
        logs.update(matching)
    return logs, malformed


def resolve_split(config: ExperimentConfig, logs) -> SplitSpec:
    if config.split is not None:
        return config.split
    if config.split_start is not None:
        start = config.split_start
    else:
        first = min(float(lg.events[0]) for lg in logs.values() if len(lg))
        start = (int(first) // DAY_SECONDS) * DAY_SECONDS
    train_d, val_d, test_d = config.split_days
    return SplitSpec.from_day_counts(start, train_d, val_d, test_d)


# ---------------------------------------------------------------------------
# per-task model execution


def _events_in_hours(events: np.ndarray, origin: int, before: float) -> np.ndarray:
    ev = events[events < before]
    return (ev - origin) / 3600.0


def _hours(origin: int, t: float) -> float:
    return (t - origin) / 3600.0


def _run_shifted(spec, ctx) -> tuple[BinnedSeries, dict]:
    horizon = len(ctx["test"])
    if ctx["protocol"] == SHORT_TERM:
        block = int(spec.options.get("block", ctx["block"]))
        return rolling_shifted_forecast(ctx["history"], ctx["test"], block), {}
    source = spec.options.get("source", "pre_test")
    if source == "train_tail":
        train = ctx["train"]
        if len(train) < horizon:
            raise DataError(f"train has {len(train)} bins, needs {horizon}")
        fc = BinnedSeries(ctx["test"].start, train.counts[-horizon:], train.bin_width)
        return fc, {}
    return shifted_forecast(ctx["history"], horizon), {}


def _run_arima(spec, ctx) -> tuple[BinnedSeries, dict]:
    train, test = ctx["train"], ctx["test"]
    artifacts: dict = {}
    if "order" in spec.options:
        order = arima_mod.ArimaOrder(*spec.options["order"])
    else:
        grid_opt = spec.options.get("grid", True)
        grid = None if grid_opt is True else [arima_mod.ArimaOrder(*o) for o in grid_opt]
        order, scores = arima_mod.grid_search_arima(train, ctx["validation"], grid)
        artifacts["grid_scores"] = scores
    model = arima_mod.fit_arima(train, order)
    artifacts["model_json"] = model.to_json()
    fc = arima_mod.forecast_arima(
        model,
        ctx["history"],
        len(test),
        protocol=ctx["protocol"],
        test_gt=test if ctx["protocol"] == SHORT_TERM else None,
        block=ctx["block"],
    )
    return fc, artifacts


def _run_hawkes(spec, ctx) -> tuple[BinnedSeries, dict]:
    origin = ctx["split"].span[0]
    split: SplitSpec = ctx["split"]
    events = ctx["log"].events
    fit_times = _events_in_hours(events, origin, split.train[1])
    fit_t = _hours(origin, split.train[1])
    fit = hawkes_mod.fit_hawkes_em(
        fit_times,
        fit_t,
        tol=float(spec.options.get("tol", 1e-6)),
        max_iter=int(spec.options.get("max_iter", 500)),
    )
    seed = int(ctx["seed"].generate_state(2, np.uint64)[0])
    plan = hawkes_mod.SimulationPlan(n_sims=int(spec.options.get("n_sims", 100)), seed=seed)
    test = ctx["test"]
    width = test.bin_width
    artifacts = {"model_json": fit.to_json()}

    if ctx["protocol"] == LONG_TERM:
        history = _events_in_hours(events, origin, split.test[0])
        fc = hawkes_mod.hawkes_forecast(
            fit.params,
            history,
            _hours(origin, split.test[0]),
            len(test),
            plan=plan,
            bin_width=width,
            origin_s=origin,
        )
        return fc, artifacts

    block = ctx["block"]
    width_s = test.width_seconds
    parts = []
    for b in range(len(test) // block):
        block_start = split.test[0] + b * block * width_s
        history = _events_in_hours(events, origin, block_start)
        piece = hawkes_mod.hawkes_forecast(
            fit.params,
            history,
            _hours(origin, block_start),
            block,
            plan=hawkes_mod.SimulationPlan(plan.n_sims, seed + b),
            bin_width=width,
            origin_s=origin,
        )
        parts.append(piece.counts)
    fc = BinnedSeries(test.start, np.concatenate(parts), width)
    return fc, artifacts


def _run_ensemble(spec, ctx) -> tuple[BinnedSeries, dict]:
    completed = ctx["completed"]
    components = []
    for name in spec.options["components"]:
        if name not in completed:
            raise DataError(f"component {name!r} did not produce a forecast")
        components.append(completed[name])
    weights = spec.options.get("weights")
    return combine(components, weights), {}


_RUNNERS = {
    "shifted": _run_shifted,
    "arima": _run_arima,
    "hawkes": _run_hawkes,
    "ensemble": _run_ensemble,
}


# ---------------------------------------------------------------------------
# experiment driver


@dataclass
class _TopicResult:
    domain: str
    platform: str
    topic: str
    full: BinnedSeries
    test: BinnedSeries
    forecasts: dict[str, BinnedSeries]
    vectors: dict[str, MetricVector]
    tasks: list[TaskRecord]
    artifacts: dict[str, dict]


def _run_topic(config: ExperimentConfig, key, lg: EventLog, split: SplitSpec) -> _TopicResult:
    domain, platform, topic = key
    full = bin_events(lg, split.span, config.bin_width)
    train, validation, test = split_series(full, split)
    history = full.window(split.train[0], split.test[0])
    ctx = {
        "train": train,
        "validation": validation,
        "test": test,
        "history": history,
        "split": split,
        "log": lg,
        "protocol": config.protocol,
        "block": config.block,
        "completed": {},
    }
    result = _TopicResult(domain, platform, topic, full, test, {}, {}, [], {})
    for spec in config.models:
        record = TaskRecord(domain, platform, topic, spec.name)
        started = time.perf_counter()
        try:
            ctx["seed"] = task_seed(config.seed, domain, platform, topic, spec.name)
            forecast, artifacts = _RUNNERS[spec.type](spec, ctx)
            ctx["completed"][spec.name] = forecast
            result.forecasts[spec.name] = forecast
            result.vectors[spec.name] = evaluate_pair(SeriesPair(test, forecast))
            result.artifacts[spec.name] = artifacts
        except Exception as exc:  # single-task failure: record, keep running
            record.status = "error"
            record.error = f"{type(exc).__name__}: {exc}"
            log.warning("task %s failed: %s", record.key, record.error)
        record.seconds = time.perf_counter() - started
        result.tasks.append(record)
    return result


def _slug(*parts: str) -> str:
    return "_".join(p.replace("/", "-").replace(" ", "-") for p in parts)


def run_experiment(config: ExperimentConfig, stage: str = "run") -> RunManifest:
    """Execute the pipeline up to `stage` and persist artifacts.

    Stages nest: ingest < fit < forecast < evaluate < report = run. Every
    stage recomputes from the raw inputs, so each subcommand is standalone.
    """
    if stage not in STAGES:
        raise ConfigError(f"unknown stage {stage!r}")
    level = STAGES.index(stage)
    run_models = level >= STAGES.index("fit")
    want_forecasts = level >= STAGES.index("forecast")
    want_metrics = level >= STAGES.index("evaluate")
    want_report = level >= STAGES.index("report")

    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(config_hash(config), BACKEND, config.protocol, stage)

    logs, malformed = load_datasets(config)
    split = resolve_split(config, logs)
    keys = sorted(logs)

    (out / "gt").mkdir(exist_ok=True)
    for key in keys:
        series = bin_events(logs[key], split.span, config.bin_width)
        path = out / "gt" / f"{_slug(*key)}.csv"
        write_series_csv(series, path)
        manifest.artifacts.append(str(path.relative_to(out)))
    summary = {
        "streams": [
            {"domain": k[0], "platform": k[1], "topic": k[2], "events": len(logs[k])}
            for k in keys
        ],
        "malformed_lines": malformed,
        "split": {
            "train": [to_iso(split.train[0]), to_iso(split.train[1])],
            "validation": [to_iso(split.validation[0]), to_iso(split.validation[1])],
            "test": [to_iso(split.test[0]), to_iso(split.test[1])],
        },
    }
    (out / "ingest_report.json").write_text(json.dumps(summary, indent=2, sort_keys=True))
    manifest.artifacts.append("ingest_report.json")

    if not run_models:
        (out / "manifest.json").write_text(manifest.to_json())
        return manifest

    # per-topic model runs (bounded worker pool; results merged by key)
    results: dict[tuple, _TopicResult] = {}
    if config.workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=config.workers) as pool:
            futures = {
                pool.submit(_run_topic, config, key, logs[key], split): key for key in keys
            }
            for fut in concurrent.futures.as_completed(futures):
                results[futures[fut]] = fut.result()
    else:
        for key in keys:
            results[key] = _run_topic(config, key, logs[key], split)

    for key in keys:
        manifest.tasks.extend(results[key].tasks)

    # fitted-model artifacts
    (out / "models").mkdir(exist_ok=True)
    (out / "gridsearch").mkdir(exist_ok=True)
    for key in keys:
        res = results[key]
        for spec in config.models:
            artifacts = res.artifacts.get(spec.name, {})
            if "model_json" in artifacts:
                path = out / "models" / f"{_slug(*key, spec.name)}.json"
                path.write_text(artifacts["model_json"])
                manifest.artifacts.append(str(path.relative_to(out)))
            if "grid_scores" in artifacts:
                path = out / "gridsearch" / f"{_slug(*key, spec.name)}.csv"
                rows = [
                    [o.p, o.d, o.q, repr(s) if np.isfinite(s) else "NA"]
                    for o, s in sorted(artifacts["grid_scores"].items())
                ]
                write_csv(path, ["p", "d", "q", "val_rmse"], rows)
                manifest.artifacts.append(str(path.relative_to(out)))

    if want_forecasts:
        (out / "forecasts").mkdir(exist_ok=True)
        for key in keys:
            res = results[key]
            for spec in config.models:
                if spec.name in res.forecasts:
                    path = out / "forecasts" / f"{_slug(*key, spec.name)}.csv"
                    write_series_csv(res.forecasts[spec.name], path)
                    manifest.artifacts.append(str(path.relative_to(out)))

    if want_metrics:
        rows = []
        for key in keys:
            res = results[key]
            for spec in config.models:
                if spec.name in res.vectors:
                    rows.append(csv_row(*key, spec.name, res.vectors[spec.name]))
        write_csv(out / "metrics.csv", csv_header(), rows)
        manifest.artifacts.append("metrics.csv")

    if want_report:
        _emit_reports(config, out, results, keys, manifest)
        emit_plots(config, out, results, keys, manifest)

    (out / "manifest.json").write_text(manifest.to_json())
    return manifest


def _aggregate_group(config, results, group_keys):
    """Sum test GT and per-model forecasts across a group's topics.

    Topics where any model failed are dropped group-wide so every model is
    aggregated over the same series.
    """
    model_names = [m.name for m in config.models]
    usable = [k for k in group_keys if all(n in results[k].forecasts for n in model_names)]
    if not usable:
        return None, None
    gt_total = np.sum([results[k].test.counts for k in usable], axis=0)
    ref = results[usable[0]].test
    gt = BinnedSeries(ref.start, gt_total, ref.bin_width)
    per_model = {}
    for name in model_names:
        total = np.sum([results[k].forecasts[name].counts for k in usable], axis=0)
        per_model[name] = BinnedSeries(ref.start, total, ref.bin_width)
    return gt, per_model


def _emit_reports(config, out: Path, results, keys, manifest: RunManifest):
    groups = sorted({(k[0], k[1]) for k in keys})
    norm_cols = [f"n{CSV_COLUMNS.get(m, m)}" for m in METRIC_NAMES]

    reports: list[OnmeReport] = []
    onme_rows = []
    for group in groups:
        group_keys = [k for k in keys if (k[0], k[1]) == group]
        gt, per_model = _aggregate_group(config, results, group_keys)
        if gt is None:
            manifest.groups.append(
                {"domain": group[0], "platform": group[1], "status": "skipped",
                 "error": "no topic with forecasts from every model"}
            )
            continue
        vectors = {
            name: evaluate_pair(SeriesPair(gt, fc)) for name, fc in per_model.items()
        }
        try:
            report = make_report(ModelErrorTable(group, vectors), config.metrics)
        except TsBaselinesError as exc:
            manifest.groups.append(
                {"domain": group[0], "platform": group[1], "status": "skipped",
                 "error": str(exc)}
            )
            continue
        reports.append(report)
        manifest.groups.append({"domain": group[0], "platform": group[1], "status": "ok"})
        for name in per_model:
            row = [group[0], group[1], name]
            for metric in METRIC_NAMES:
                share = report.normalized.get(metric, {}).get(name)
                row.append("NA" if share is None else repr(share))
            row.append(repr(report.onme[name]))
            onme_rows.append(row)
    write_csv(out / "onme.csv", ["domain", "platform", "model"] + norm_cols + ["onme"], onme_rows)
    manifest.artifacts.append("onme.csv")

    if reports:
        try:
            summary = onme_summary(reports)
            write_csv(
                out / "onme_summary.csv",
                ["model", "onme", "groups"],
                [[name, repr(value), len(reports)] for name, value in summary.items()],
            )
            manifest.artifacts.append("onme_summary.csv")
        except TsBaselinesError as exc:
            log.warning("summary skipped: %s", exc)

    # per-topic normalized errors (figure-style data)
    topic_rows = []
    for key in keys:
        res = results[key]
        if len(res.vectors) < 2:
            continue
        try:
            report = make_report(ModelErrorTable(key, res.vectors), config.metrics)
        except TsBaselinesError:
            continue
        for name in report.onme:
            row = list(key) + [name]
            for metric in METRIC_NAMES:
                share = report.normalized.get(metric, {}).get(name)
                row.append("NA" if share is None else repr(share))
            row.append(repr(report.onme[name]))
            topic_rows.append(row)
    write_csv(
        out / "normalized_topics.csv",
        ["domain", "platform", "topic", "model"] + norm_cols + ["onme"],
        topic_rows,
    )
    manifest.artifacts.append("normalized_topics.csv")


def _heatmap_models(config: ExperimentConfig):
    base = next((m.name for m in config.models if m.type == "arima"), None)
    challenger = next((m.name for m in config.models if m.type == "shifted"), None)
    return base, challenger


def emit_plots(config: ExperimentConfig, out: Path, results, keys, manifest: RunManifest):
    """Overlay data/SVG per topic plus win heatmaps per platform."""
    (out / "overlays").mkdir(exist_ok=True)
    for key in keys:
        res = results[key]
        names = [m.name for m in config.models if m.name in res.forecasts]
        header = ["bin", "gt"] + names
        rows = []
        w = res.test.width_seconds
        for i in range(len(res.test)):
            row = [to_iso(res.test.start + i * w), fmt_count(res.test.counts[i])]
            row += [repr(float(res.forecasts[n].counts[i])) for n in names]
            rows.append(row)
        path = out / "overlays" / f"{_slug(*key)}.csv"
        write_csv(path, header, rows)
        manifest.artifacts.append(str(path.relative_to(out)))
        svg = render_overlay_svg(
            {"gt": res.test, **{n: res.forecasts[n] for n in names}},
            title="/".join(key),
        )
        svg_path = path.with_suffix(".svg")
        svg_path.write_text(svg)
        manifest.artifacts.append(str(svg_path.relative_to(out)))

    base, challenger = _heatmap_models(config)
    if base is None or challenger is None:
        return
    heatmap_rows = []
    platforms = sorted({k[1] for k in keys})
    for platform in platforms:
        cells: list[HeatmapCell] = []
        labels = []
        for key in keys:
            if key[1] != platform:
                continue
            res = results[key]
            if base not in res.vectors or challenger not in res.vectors:
                continue
            label = f"{key[0]}/{key[2]}"
            labels.append(label)
            cells.extend(improvement_cells({label: (res.vectors[base], res.vectors[challenger])}))
        if not cells:
            continue
        for cell in cells:
            heatmap_rows.append(
                [
                    f"{platform}/{cell.topic}" if len(platforms) > 1 else cell.topic,
                    cell.metric,
                    repr(cell.value) if np.isfinite(cell.value) else "-inf",
                    "1" if cell.win else "0",
                ]
            )
        svg = render_heatmap_svg(
            cells,
            labels,
            list(config.metrics or METRIC_NAMES),
            title=f"{challenger} vs {base} ({platform}, {config.protocol})",
        )
        svg_path = out / f"heatmap_{_slug(platform)}.svg"
        svg_path.write_text(svg)
        manifest.artifacts.append(svg_path.name)
    write_csv(
        out / "heatmap.csv",
        ["topic", "metric", "percent_improvement", "win"],
        heatmap_rows,
    )
    manifest.artifacts.append("heatmap.csv")


# ---------------------------------------------------------------------------
# replay mode: raw metric table -> normalized reports


def replay_metrics(rows: Sequence[dict], metrics: Optional[Sequence[str]] = None):
    """Reports from a pre-filled raw metric table (no fitting).

    Each row carries domain, platform, model, and raw metric values (None for
    undefined). Rows group by (domain, platform); topic-level rows group by
    (domain, platform, topic) when a topic field is present and non-empty.
    """
    grouped: dict[tuple, dict[str, MetricVector]] = {}
    for row in rows:
        group = (row["domain"], row["platform"])
        if row.get("topic"):
            group = group + (row["topic"],)
        vec = MetricVector(**{name: row.get(name) for name in METRIC_NAMES})
        grouped.setdefault(group, {})[row["model"]] = vec
    reports = [
        make_report(ModelErrorTable(group, models), metrics)
        for group, models in sorted(grouped.items())
    ]
    summary = onme_summary(reports)
    return reports, summary


def read_raw_metrics_csv(path) -> list[dict]:
    """Rows of a `domain,platform,topic,model,ape,...` CSV; NA becomes None."""
    import csv as _csv

    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = _csv.DictReader(fh)
        short_to_long = {CSV_COLUMNS.get(m, m): m for m in METRIC_NAMES}
        rows = []
        for raw in reader:
            row = {
                "domain": raw.get("domain", ""),
                "platform": raw.get("platform", ""),
                "topic": raw.get("topic", ""),
                "model": raw["model"],
            }
            for short, name in short_to_long.items():
                value = raw.get(short, raw.get(name, "NA"))
                row[name] = None if value in ("", "NA", None) else float(value)
            rows.append(row)
    return rows


def write_replay_outputs(reports, summary, out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    norm_cols = [f"n{CSV_COLUMNS.get(m, m)}" for m in METRIC_NAMES]
    rows = []
    for report in reports:
        domain, platform = report.group[0], report.group[1]
        for name in report.onme:
            row = [domain, platform, name]
            for metric in METRIC_NAMES:
                share = report.normalized.get(metric, {}).get(name)
                row.append("NA" if share is None else repr(share))
            row.append(repr(report.onme[name]))
            rows.append(row)
    write_csv(out / "onme.csv", ["domain", "platform", "model"] + norm_cols + ["onme"], rows)
    write_csv(
        out / "onme_summary.csv",
        ["model", "onme", "groups"],
        [[name, repr(value), len(reports)] for name, value in summary.items()],
    )
