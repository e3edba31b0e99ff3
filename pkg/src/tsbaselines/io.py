"""File formats: JSON Lines event streams and binned-series CSV.

Event lines carry `timestamp` (ISO-8601, UTC assumed when zone-less),
`platform`, `topic`, `domain`, and optionally `user_id` and `action`.
Binned series serialize as CSV with header `bin_start_iso,count`.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .core import BinnedSeries, to_epoch, to_iso
from .errors import DataError

REQUIRED_EVENT_FIELDS = ("timestamp", "platform", "topic", "domain")


def fmt_count(x: float) -> str:
    """Stable numeric formatting: integral values print without a decimal."""
    if float(x).is_integer() and abs(x) < 2**53:
        return str(int(x))
    return repr(float(x))


def parse_event_line(line: str) -> dict:
    """One event record; raises DataError for malformed lines."""
    try:
        doc = json.loads(line)
    except json.JSONDecodeError as exc:
        raise DataError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise DataError("event line must be a JSON object")
    missing = [f for f in REQUIRED_EVENT_FIELDS if f not in doc]
    if missing:
        raise DataError(f"missing fields: {missing}")
    try:
        ts = to_epoch(doc["timestamp"])
    except (DataError, ValueError, TypeError) as exc:
        raise DataError(f"unparseable timestamp {doc['timestamp']!r}") from exc
    return {
        "timestamp": ts,
        "platform": str(doc["platform"]),
        "topic": str(doc["topic"]),
        "domain": str(doc["domain"]),
    }


def read_events_jsonl(path, strict: bool = False) -> tuple[list[dict], int]:
    """All parseable event records plus the malformed-line count.

    Lenient mode skips bad lines; strict mode raises on the first one.
    """
    records = []
    malformed = 0
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                records.append(parse_event_line(line))
            except DataError as exc:
                if strict:
                    raise DataError(f"{path}:{lineno}: {exc}") from exc
                malformed += 1
    return records, malformed


def write_events_jsonl(path, records: Iterable[dict]) -> None:
    """Inverse of read_events_jsonl; timestamps may be epoch seconds or ISO."""
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            ts = rec["timestamp"]
            doc = {
                "timestamp": ts if isinstance(ts, str) else _epoch_to_event_iso(float(ts)),
                "platform": rec["platform"],
                "topic": rec["topic"],
                "domain": rec["domain"],
            }
            for extra in ("user_id", "action"):
                if extra in rec:
                    doc[extra] = rec[extra]
            fh.write(json.dumps(doc) + "\n")


def _epoch_to_event_iso(ts: float) -> str:
    """ISO-8601 with fractional seconds preserved."""
    from datetime import datetime, timezone

    dt = datetime.fromtimestamp(ts, tz=timezone.utc)
    if ts == int(ts):
        return dt.strftime("%Y-%m-%dT%H:%M:%SZ")
    return dt.strftime("%Y-%m-%dT%H:%M:%S.%fZ")


def write_series_csv(series: BinnedSeries, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_start_iso", "count"])
        w = series.width_seconds
        for k, value in enumerate(series.counts):
            writer.writerow([to_iso(series.start + k * w), fmt_count(value)])


def read_series_csv(path, bin_width: Optional[float] = None) -> BinnedSeries:
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[:2] != ["bin_start_iso", "count"]:
            raise DataError(f"{path}: expected header bin_start_iso,count")
        starts = []
        counts = []
        for row in reader:
            if not row:
                continue
            starts.append(to_epoch(row[0]))
            counts.append(float(row[1]))
    if not counts:
        raise DataError(f"{path}: no data rows")
    if bin_width is None:
        if len(starts) > 1:
            bin_width = (starts[1] - starts[0]) / 3600.0
        else:
            bin_width = 1.0
    return BinnedSeries(round(starts[0]), np.asarray(counts), bin_width)


def write_csv(path, header: list[str], rows: Iterable[list]) -> None:
    """Generic deterministic CSV writer."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)
