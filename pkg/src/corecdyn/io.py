"""CSV, JSON and minimal SVG writers used by the CLI."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 720, 440
MARGIN = dict(left=70, right=150, top=40, bottom=55)

CLASS_COLORS = {
    "FixedPoint": "#2b83ba",
    "Periodic": "#fdae61",
    "Chaotic": "#d7191c",
    "Undetermined": "#bdbdbd",
    "Undefined": "#ffffff",
}


def fmt(value) -> str:
    """Twelve significant digits, the precision used for every numeric CSV field."""
    return f"{value:.12g}"


def write_csv(path: Path, header: list[str], rows) -> int:
    count = 0
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) if isinstance(v, float) else v for v in row])
            count += 1
    return count


def write_json(path: Path, data) -> None:
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-12 * step:
        ticks.append(round(v, 12))
        v += step
    return ticks


class _Axes:
    def __init__(self, xlim, ylim):
        self.x0, self.x1 = xlim
        self.y0, self.y1 = ylim
        if self.x1 == self.x0:
            self.x1 = self.x0 + 1.0
        if self.y1 == self.y0:
            self.y0, self.y1 = self.y0 - 0.5, self.y1 + 0.5
        self.left = MARGIN["left"]
        self.right = WIDTH - MARGIN["right"]
        self.top = MARGIN["top"]
        self.bottom = HEIGHT - MARGIN["bottom"]

    def px(self, x):
        return self.left + (x - self.x0) / (self.x1 - self.x0) * (self.right - self.left)

    def py(self, y):
        return self.bottom - (y - self.y0) / (self.y1 - self.y0) * (self.bottom - self.top)


def _frame(ax: _Axes, title: str, xlabel: str, ylabel: str) -> list[str]:
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>',
    ]
    for t in _ticks(ax.x0, ax.x1):
        x = ax.px(t)
        out.append(f'<line x1="{x:.2f}" y1="{ax.top}" x2="{x:.2f}" y2="{ax.bottom}" stroke="#e6e6e6"/>')
        out.append(f'<text x="{x:.2f}" y="{ax.bottom + 16}" text-anchor="middle">{t:g}</text>')
    for t in _ticks(ax.y0, ax.y1):
        y = ax.py(t)
        out.append(f'<line x1="{ax.left}" y1="{y:.2f}" x2="{ax.right}" y2="{y:.2f}" stroke="#e6e6e6"/>')
        out.append(f'<text x="{ax.left - 6}" y="{y + 4:.2f}" text-anchor="end">{t:g}</text>')
    out.append(f'<rect x="{ax.left}" y="{ax.top}" width="{ax.right - ax.left}" '
               f'height="{ax.bottom - ax.top}" fill="none" stroke="black"/>')
    out.append(f'<text x="{(ax.left + ax.right) / 2:.1f}" y="{HEIGHT - 15}" '
               f'text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="18" y="{(ax.top + ax.bottom) / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 18 {(ax.top + ax.bottom) / 2:.1f})">{escape(ylabel)}</text>')
    return out


def line_plot_svg(xs, series, hlines=(), title="", xlabel="", ylabel="") -> str:
    """``series`` is a list of ``(ys, color, label)``; ``hlines`` of ``(y, color, label)``."""
    ys_all = [y for ys, _, _ in series for y in ys] + [y for y, _, _ in hlines]
    pad = 0.05 * (max(ys_all) - min(ys_all) or 1.0)
    ax = _Axes((min(xs), max(xs)), (min(ys_all) - pad, max(ys_all) + pad))
    out = _frame(ax, title, xlabel, ylabel)
    legend = []
    for y, color, label in hlines:
        py = ax.py(y)
        out.append(f'<line x1="{ax.left}" y1="{py:.2f}" x2="{ax.right}" y2="{py:.2f}" '
                   f'stroke="{color}" stroke-dasharray="6 4"/>')
        legend.append((color, label, True))
    for ys, color, label in series:
        pts = " ".join(f"{ax.px(x):.2f},{ax.py(y):.2f}" for x, y in zip(xs, ys))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        if len(xs) <= 60:
            out.extend(f'<circle cx="{ax.px(x):.2f}" cy="{ax.py(y):.2f}" r="2.5" fill="{color}"/>'
                       for x, y in zip(xs, ys))
        legend.append((color, label, False))
    for i, (color, label, dashed) in enumerate(legend):
        y = ax.top + 10 + 18 * i
        dash = ' stroke-dasharray="6 4"' if dashed else ""
        out.append(f'<line x1="{ax.right + 10}" y1="{y}" x2="{ax.right + 34}" y2="{y}" '
                   f'stroke="{color}" stroke-width="2"{dash}/>')
        out.append(f'<text x="{ax.right + 40}" y="{y + 4}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def heatmap_svg(d0_values, eps_values, labels, title="") -> str:
    """Class map over (eps, d0); ``labels[i][j]`` belongs to ``d0_values[i]``, ``eps_values[j]``."""
    ax = _Axes((0.0, float(len(eps_values))), (0.0, float(len(d0_values))))
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>',
    ]
    seen = []
    for i, row in enumerate(labels):
        for j, label in enumerate(row):
            kind = label.split("(")[0]
            color = CLASS_COLORS.get(kind, "#000000")
            if label not in seen:
                seen.append(label)
            x, y = ax.px(j), ax.py(i + 1)
            w = ax.px(j + 1) - x
            h = ax.py(i) - y
            out.append(f'<rect x="{x:.2f}" y="{y:.2f}" width="{w:.2f}" height="{h:.2f}" '
                       f'fill="{color}" stroke="#666666" stroke-width="0.5"><title>'
                       f'd0={d0_values[i]:g} eps={eps_values[j]:g}: {escape(label)}</title></rect>')
            if kind == "Periodic":
                out.append(f'<text x="{x + w / 2:.2f}" y="{y + h / 2 + 4:.2f}" '
                           f'text-anchor="middle" font-size="10">{label[9:-1]}</text>')
    stride = max(1, len(eps_values) // 8)
    for j in range(0, len(eps_values), stride):
        out.append(f'<text x="{ax.px(j + 0.5):.2f}" y="{ax.bottom + 16}" '
                   f'text-anchor="middle">{eps_values[j]:.3g}</text>')
    stride = max(1, len(d0_values) // 8)
    for i in range(0, len(d0_values), stride):
        out.append(f'<text x="{ax.left - 6}" y="{ax.py(i + 0.5) + 4:.2f}" '
                   f'text-anchor="end">{d0_values[i]:.3g}</text>')
    out.append(f'<text x="{(ax.left + ax.right) / 2:.1f}" y="{HEIGHT - 15}" '
               f'text-anchor="middle">amplitude eps</text>')
    out.append(f'<text x="18" y="{(ax.top + ax.bottom) / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 18 {(ax.top + ax.bottom) / 2:.1f})">mean thickness d0</text>')
    for k, label in enumerate(sorted(seen)):
        y = ax.top + 18 * k
        color = CLASS_COLORS.get(label.split("(")[0], "#000000")
        out.append(f'<rect x="{ax.right + 10}" y="{y}" width="14" height="14" fill="{color}" '
                   f'stroke="#666666"/>')
        out.append(f'<text x="{ax.right + 30}" y="{y + 11}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
