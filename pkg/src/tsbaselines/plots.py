"""Minimal, dependency-free SVG renders: forecast overlays and win heatmaps.

Hand-rolled SVG keeps the artifacts deterministic (no font metrics or
renderer state) and easy to validate with an XML parser.
"""

from __future__ import annotations

import math
from typing import Mapping, Sequence
from xml.sax.saxutils import escape

from .core import BinnedSeries
from .evaluation import HeatmapCell

PALETTE = ("#000000", "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

WIN_FILL = "#b7e4c7"
LOSS_FILL = "#ffffff"


def _fmt(x: float) -> str:
    return f"{x:.2f}".rstrip("0").rstrip(".") if math.isfinite(x) else "-inf"


def render_overlay_svg(
    series_by_name: Mapping[str, BinnedSeries],
    title: str = "",
    width: int = 960,
    height: int = 360,
) -> str:
    """Line chart of aligned series (ground truth plus forecasts)."""
    if not series_by_name:
        raise ValueError("nothing to plot")
    names = list(series_by_name)
    n = max(len(s) for s in series_by_name.values())
    top = max((float(max(s.counts)) for s in series_by_name.values()), default=1.0)
    top = top if top > 0 else 1.0
    margin = 50
    plot_w = width - 2 * margin
    plot_h = height - 2 * margin

    def sx(i: int) -> float:
        return margin + (plot_w * i / max(n - 1, 1))

    def sy(v: float) -> float:
        return margin + plot_h * (1.0 - v / top)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<line x1="{margin}" y1="{margin + plot_h}" x2="{margin + plot_w}" '
        f'y2="{margin + plot_h}" stroke="#444"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{margin + plot_h}" stroke="#444"/>',
        f'<text x="{margin - 6}" y="{margin + 4}" text-anchor="end" font-size="10">{_fmt(top)}</text>',
        f'<text x="{margin - 6}" y="{margin + plot_h + 4}" text-anchor="end" font-size="10">0</text>',
    ]
    for idx, name in enumerate(names):
        series = series_by_name[name]
        color = PALETTE[idx % len(PALETTE)]
        points = " ".join(
            f"{sx(i):.2f},{sy(float(v)):.2f}" for i, v in enumerate(series.counts)
        )
        parts.append(
            f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        ly = margin + 16 * idx
        parts.append(
            f'<line x1="{margin + plot_w - 120}" y1="{ly}" x2="{margin + plot_w - 100}" '
            f'y2="{ly}" stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{margin + plot_w - 94}" y="{ly + 4}" font-size="11">{escape(name)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts)


def render_heatmap_svg(
    cells: Sequence[HeatmapCell],
    topics: Sequence[str],
    metrics: Sequence[str],
    title: str = "",
) -> str:
    """Topic-by-metric grid; winning cells green, values printed per cell."""
    cell_w, cell_h = 90, 26
    label_w, header_h = 240, 50
    width = label_w + cell_w * len(metrics) + 20
    height = header_h + cell_h * len(topics) + 20
    lookup = {(c.topic, c.metric): c for c in cells}
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2}" y="18" text-anchor="middle" font-size="14">{escape(title)}</text>',
    ]
    for j, metric in enumerate(metrics):
        x = label_w + j * cell_w + cell_w / 2
        parts.append(
            f'<text x="{x}" y="{header_h - 8}" text-anchor="middle" font-size="11">'
            f"{escape(metric)}</text>"
        )
    for i, topic in enumerate(topics):
        y = header_h + i * cell_h
        parts.append(
            f'<text x="{label_w - 8}" y="{y + cell_h / 2 + 4}" text-anchor="end" '
            f'font-size="11">{escape(topic)}</text>'
        )
        for j, metric in enumerate(metrics):
            x = label_w + j * cell_w
            cell = lookup.get((topic, metric))
            fill = WIN_FILL if (cell is not None and cell.win) else LOSS_FILL
            parts.append(
                f'<rect x="{x}" y="{y}" width="{cell_w}" height="{cell_h}" '
                f'fill="{fill}" stroke="#999"/>'
            )
            if cell is not None:
                parts.append(
                    f'<text x="{x + cell_w / 2}" y="{y + cell_h / 2 + 4}" text-anchor="middle" '
                    f'font-size="10">{_fmt(cell.value)}</text>'
                )
    parts.append("</svg>")
    return "\n".join(parts)
