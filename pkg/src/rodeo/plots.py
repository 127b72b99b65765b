"""Dependency-free SVG figures: scan heatmap, scan curves, phi-sweep panels.

Output is plain SVG 1.1 text with fixed numeric formatting so identical
inputs give byte-identical files.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"]
FONT = 'font-family="Helvetica,Arial,sans-serif"'


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")


def _f(x: float) -> str:
    return f"{x:.2f}"


def _header(width: int, height: int) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
    ]


def _text(x, y, s, size=13, anchor="middle", extra="") -> str:
    return f'<text x="{_f(x)}" y="{_f(y)}" text-anchor="{anchor}" font-size="{size}" {FONT}{extra}>{_escape(s)}</text>'


def _ticks(lo: float, hi: float, n: int = 6) -> list[float]:
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / n
    mag = 10 ** np.floor(np.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=raw)
    start = np.ceil(lo / step) * step
    return [float(v) for v in np.arange(start, hi + step * 1e-9, step)]


def _viridis_like(v: float) -> str:
    """Map [0, 1] onto a dark-blue -> yellow ramp."""
    stops = [(0.0, (68, 1, 84)), (0.25, (59, 82, 139)), (0.5, (33, 145, 140)), (0.75, (94, 201, 98)), (1.0, (253, 231, 37))]
    v = min(max(v, 0.0), 1.0)
    for (x0, c0), (x1, c1) in zip(stops, stops[1:]):
        if v <= x1:
            t = (v - x0) / (x1 - x0)
            r, g, b = (round(a + t * (b_ - a)) for a, b_ in zip(c0, c1))
            return f"#{r:02x}{g:02x}{b:02x}"
    return "#fde725"


class _Axes:
    def __init__(self, left, top, width, height, xlim, ylim):
        self.left, self.top, self.width, self.height = left, top, width, height
        self.xlim, self.ylim = xlim, ylim

    def x(self, v):
        lo, hi = self.xlim
        return self.left + (v - lo) / (hi - lo) * self.width

    def y(self, v):
        lo, hi = self.ylim
        return self.top + self.height - (v - lo) / (hi - lo) * self.height

    def frame(self, xlabel: str, ylabel: str, xfmt="{:.2f}", yfmt="{:.2f}") -> list[str]:
        out = [
            f'<rect x="{_f(self.left)}" y="{_f(self.top)}" width="{_f(self.width)}" height="{_f(self.height)}" '
            'fill="none" stroke="#000000" stroke-width="1"/>'
        ]
        bottom = self.top + self.height
        for t in _ticks(*self.xlim):
            px = self.x(t)
            out.append(f'<line x1="{_f(px)}" y1="{_f(bottom)}" x2="{_f(px)}" y2="{_f(bottom + 5)}" stroke="#000000"/>')
            out.append(_text(px, bottom + 19, xfmt.format(t), 11))
        for t in _ticks(*self.ylim, n=5):
            py = self.y(t)
            out.append(f'<line x1="{_f(self.left - 5)}" y1="{_f(py)}" x2="{_f(self.left)}" y2="{_f(py)}" stroke="#000000"/>')
            out.append(_text(self.left - 8, py + 4, yfmt.format(t), 11, "end"))
        out.append(_text(self.left + self.width / 2, bottom + 38, xlabel, 13))
        cx, cy = self.left - 52, self.top + self.height / 2
        out.append(_text(cx, cy, ylabel, 13, extra=f' transform="rotate(-90 {_f(cx)} {_f(cy)})"'))
        return out

    def polyline(self, xs, ys, color, width=2.0, dash: str | None = None) -> str:
        pts = " ".join(f"{_f(self.x(a))},{_f(self.y(b))}" for a, b in zip(xs, ys))
        d = f' stroke-dasharray="{dash}"' if dash else ""
        return f'<polyline fill="none" stroke="{color}" stroke-width="{width}"{d} points="{pts}"/>'


def scan_heatmap_svg(stage_rows: Sequence[Sequence], e_range: tuple[float, float], title: str = "") -> str:
    """One row per scan stage; each grid point is a bin colored by its success probability.

    ``stage_rows[s]`` is a sequence of ScanResult objects for stage ``s``.
    """
    width, row_h = 900, 60
    left, top = 110, 50
    plot_w = width - left - 130
    height = top + row_h * len(stage_rows) + 70
    ax = _Axes(left, top, plot_w, row_h * len(stage_rows), e_range, (0, 1))
    out = _header(width, height)
    if title:
        out.append(_text(width / 2, 28, title, 16))
    for s, scans in enumerate(stage_rows):
        y0 = top + s * row_h
        sigma = scans[0].stage.sigma if scans else 0.0
        out.append(_text(left - 10, y0 + row_h / 2 + 4, f"σ = {sigma:g}", 12, "end"))
        for scan in scans:
            e = scan.energies
            step = (e[-1] - e[0]) / (len(e) - 1) if len(e) > 1 else 0.0
            for energy, frac in zip(e, scan.fractions):
                x0 = max(ax.x(energy - step / 2), left)
                x1 = min(ax.x(energy + step / 2), left + plot_w)
                if x1 <= x0:
                    continue
                out.append(
                    f'<rect x="{_f(x0)}" y="{_f(y0 + 4)}" width="{_f(x1 - x0)}" height="{row_h - 8}" '
                    f'fill="{_viridis_like(frac)}"/>'
                )
    out.append(
        f'<rect x="{left}" y="{top}" width="{plot_w}" height="{row_h * len(stage_rows)}" fill="none" stroke="#000000"/>'
    )
    bottom = top + row_h * len(stage_rows)
    for t in _ticks(*e_range):
        px = ax.x(t)
        out.append(f'<line x1="{_f(px)}" y1="{bottom}" x2="{_f(px)}" y2="{bottom + 5}" stroke="#000000"/>')
        out.append(_text(px, bottom + 19, f"{t:.2f}", 11))
    out.append(_text(left + plot_w / 2, bottom + 40, "target energy E", 13))
    # color bar
    bx = left + plot_w + 30
    for i in range(50):
        v = 1 - i / 49
        out.append(f'<rect x="{bx}" y="{_f(top + i * (bottom - top) / 50)}" width="16" height="{_f((bottom - top) / 50 + 0.5)}" fill="{_viridis_like(v)}"/>')
    out.append(_text(bx + 22, top + 10, "1.0", 11, "start"))
    out.append(_text(bx + 22, bottom, "0.0", 11, "start"))
    out.append("</svg>")
    return "\n".join(out) + "\n"


def scan_curves_svg(
    stage_rows: Sequence[Sequence],
    e_range: tuple[float, float],
    expected: Callable[[np.ndarray, float], np.ndarray] | None = None,
    title: str = "",
) -> str:
    """Success probability against E, one panel per stage, with optional dashed exact curves."""
    width, panel_h = 900, 220
    left, top, gap = 90, 50, 60
    plot_w = width - left - 40
    height = top + len(stage_rows) * (panel_h + gap) + 10
    out = _header(width, height)
    if title:
        out.append(_text(width / 2, 28, title, 16))
    for s, scans in enumerate(stage_rows):
        if not scans:
            continue
        y0 = top + s * (panel_h + gap)
        sigma = scans[0].stage.sigma
        lo = min(sc.stage.e_min for sc in scans) if s else e_range[0]
        hi = max(sc.stage.e_max for sc in scans) if s else e_range[1]
        ax = _Axes(left, y0, plot_w, panel_h, (lo, hi), (0.0, 1.05))
        out += ax.frame("target energy E", "P(success)")
        out.append(_text(left + 8, y0 + 16, f"σ = {sigma:g}", 12, "start"))
        for w, scan in enumerate(scans):
            color = COLORS[w % len(COLORS)]
            if expected is not None:
                fine = np.linspace(scan.stage.e_min, scan.stage.e_max, 200)
                out.append(ax.polyline(fine, expected(fine, sigma), "#555555", 1.2, "5,4"))
            out.append(ax.polyline(scan.energies, scan.fractions, color, 1.5))
            for e, f, err in scan.points:
                px, py = ax.x(e), ax.y(f)
                if err > 0:
                    out.append(
                        f'<line x1="{_f(px)}" y1="{_f(ax.y(f - err))}" x2="{_f(px)}" y2="{_f(ax.y(f + err))}" '
                        f'stroke="{color}" stroke-width="1"/>'
                    )
                out.append(f'<circle cx="{_f(px)}" cy="{_f(py)}" r="2.5" fill="{color}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def phi_sweep_svg(panels: Sequence[dict], title: str = "") -> str:
    """Stacked panels of level energy against phi.

    Each panel dict holds ``name``, ``phi``, ``energy``, ``error`` (sweep
    points), ``fit`` and ``fit_band`` callables, ``exact`` (values at
    ``phi``) and ``exact_fit`` callable.
    """
    width, panel_h = 760, 260
    left, top, gap = 100, 50, 70
    plot_w = width - left - 40
    height = top + len(panels) * (panel_h + gap)
    out = _header(width, height)
    if title:
        out.append(_text(width / 2, 28, title, 16))
    for i, p in enumerate(panels):
        y0 = top + i * (panel_h + gap)
        phi = np.asarray(p["phi"])
        fine = np.linspace(phi.min(), phi.max(), 121)
        fit = p["fit"](fine)
        band = 3.0 * p["fit_band"](fine)
        ys = np.concatenate([p["energy"] - p["error"], p["energy"] + p["error"], fit - band, fit + band, p["exact"]])
        pad = 0.08 * (ys.max() - ys.min() or 1.0)
        ax = _Axes(left, y0, plot_w, panel_h, (phi.min(), phi.max()), (ys.min() - pad, ys.max() + pad))
        out += ax.frame("φ", p["name"], yfmt="{:.3f}")
        poly = [f"{_f(ax.x(a))},{_f(ax.y(b))}" for a, b in zip(fine, fit + band)]
        poly += [f"{_f(ax.x(a))},{_f(ax.y(b))}" for a, b in zip(fine[::-1], (fit - band)[::-1])]
        out.append(f'<polygon points="{" ".join(poly)}" fill="#1f77b4" fill-opacity="0.2" stroke="none"/>')
        out.append(ax.polyline(fine, fit, "#1f77b4", 2.0))
        out.append(ax.polyline(fine, p["exact_fit"](fine), "#d62728", 1.5, "6,4"))
        for a, e, err, ex in zip(phi, p["energy"], p["error"], p["exact"]):
            px = ax.x(a)
            out.append(
                f'<line x1="{_f(px)}" y1="{_f(ax.y(e - err))}" x2="{_f(px)}" y2="{_f(ax.y(e + err))}" stroke="#000000"/>'
            )
            out.append(f'<circle cx="{_f(px)}" cy="{_f(ax.y(e))}" r="3.5" fill="#1f77b4" stroke="#000000"/>')
            out.append(f'<rect x="{_f(px - 3)}" y="{_f(ax.y(ex) - 3)}" width="6" height="6" fill="#d62728"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
