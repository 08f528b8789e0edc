"""Minimal deterministic SVG line charts for sweep CSVs."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

from .errors import ConfigError
from .experiment import CSV_HEADER

WIDTH, HEIGHT = 720, 480
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 80, 150, 30, 60
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")


@dataclass(frozen=True)
class Series:
    label: str
    points: tuple[tuple[float, float], ...]


def read_sweep_csv(text: str, value: str = "jy_analytic_mean") -> list[Series]:
    """Parse a sweep CSV into one series per ``p_fake`` (in file order).

    Rows with ``lambda == 0`` cannot sit on a log axis and are dropped.
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ConfigError("empty CSV") from None
    if tuple(header) != CSV_HEADER:
        raise ConfigError(f"CSV header does not match the sweep schema: {header}")
    col = CSV_HEADER.index(value)
    series: dict[int, list[tuple[float, float]]] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(CSV_HEADER):
            raise ConfigError(f"line {lineno}: expected {len(CSV_HEADER)} fields, got {len(row)}")
        try:
            p_F = int(row[0])
            lam = float(row[1])
            y = float(row[col])
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from None
        if lam > 0 and y > 0 and math.isfinite(y):
            series.setdefault(p_F, []).append((lam, y))
    if not series:
        raise ConfigError("CSV has no plottable rows (need lambda > 0)")
    return [Series(f"p_F = {p}", tuple(sorted(pts))) for p, pts in series.items()]


def _decades(lo: float, hi: float) -> list[int]:
    a, b = math.floor(math.log10(lo)), math.ceil(math.log10(hi))
    if a == b:
        b += 1
    return list(range(a, b + 1))


def _num(x: float) -> str:
    return f"{x:.2f}"


def render_svg(series: list[Series], xlabel: str = "ridge parameter lambda", ylabel: str = "mean generalization error J_y") -> str:
    xs = [x for s in series for x, _ in s.points]
    ys = [y for s in series for _, y in s.points]
    x_dec = _decades(min(xs), max(xs))
    log_y = max(ys) / min(ys) > 100
    if log_y:
        y_dec = _decades(min(ys), max(ys))
        y_lo, y_hi = float(y_dec[0]), float(y_dec[-1])
        y_ticks = [(10.0**d, f"1e{d}") for d in y_dec]
        ty = math.log10
    else:
        span = max(ys) - min(ys) or abs(max(ys)) or 1.0
        y_lo, y_hi = min(ys) - 0.05 * span, max(ys) + 0.05 * span
        step = 10 ** math.floor(math.log10((y_hi - y_lo) / 5))
        first = math.ceil(y_lo / step)
        y_ticks = [(k * step, f"{k * step:g}") for k in range(first, math.floor(y_hi / step) + 1)]
        if len(y_ticks) > 12:
            y_ticks = y_ticks[:: math.ceil(len(y_ticks) / 10)]
        ty = float
    x_lo, x_hi = float(x_dec[0]), float(x_dec[-1])
    pw, ph = WIDTH - MARGIN_L - MARGIN_R, HEIGHT - MARGIN_T - MARGIN_B

    def px(x: float) -> float:
        return MARGIN_L + (math.log10(x) - x_lo) / (x_hi - x_lo) * pw

    def py(y: float) -> float:
        return MARGIN_T + ph - (ty(y) - y_lo) / (y_hi - y_lo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for d in x_dec:
        x = _num(px(10.0**d))
        out.append(f'<line x1="{x}" y1="{MARGIN_T + ph}" x2="{x}" y2="{MARGIN_T + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{x}" y="{MARGIN_T + ph + 20}" font-size="12" text-anchor="middle">1e{d}</text>')
    for v, label in y_ticks:
        y = _num(py(v))
        out.append(f'<line x1="{MARGIN_L - 5}" y1="{y}" x2="{MARGIN_L}" y2="{y}" stroke="black"/>')
        out.append(f'<text x="{MARGIN_L - 8}" y="{y}" font-size="12" text-anchor="end" dominant-baseline="middle">{escape(label)}</text>')
    out.append(
        f'<text x="{_num(MARGIN_L + pw / 2)}" y="{HEIGHT - 15}" font-size="14" text-anchor="middle">{escape(xlabel)} (log scale)</text>'
    )
    y_title = ylabel + (" (log scale)" if log_y else "")
    out.append(
        f'<text x="18" y="{_num(MARGIN_T + ph / 2)}" font-size="14" text-anchor="middle" '
        f'transform="rotate(-90 18 {_num(MARGIN_T + ph / 2)})">{escape(y_title)}</text>'
    )
    for k, s in enumerate(series):
        color = PALETTE[k % len(PALETTE)]
        pts = " ".join(f"{_num(px(x))},{_num(py(y))}" for x, y in s.points)
        if len(s.points) == 1:
            x, y = s.points[0]
            out.append(f'<circle cx="{_num(px(x))}" cy="{_num(py(y))}" r="4" fill="{color}"/>')
        else:
            out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="2"/>')
        ly = MARGIN_T + 20 + 22 * k
        lx = MARGIN_L + pw + 15
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 25}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 32}" y="{ly}" font-size="12" dominant-baseline="middle">{escape(s.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
