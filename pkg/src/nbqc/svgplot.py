"""Minimal log-log scatter/line SVG writer (no plotting dependency)."""

from __future__ import annotations

import math

_W, _H = 640, 480
_ML, _MR, _MT, _MB = 70, 20, 20, 50


def _log_ticks(lo: float, hi: float) -> list[float]:
    out = []
    e = math.floor(math.log10(lo))
    while 10 ** e <= hi * 1.0001:
        if 10 ** e >= lo * 0.9999:
            out.append(10 ** e)
        e += 1
    return out or [lo]


class LogLogPlot:
    def __init__(self, xlabel: str, ylabel: str, title: str = ""):
        self.xlabel = xlabel
        self.ylabel = ylabel
        self.title = title
        self.series: list[tuple[str, list[tuple[float, float]], str, bool]] = []

    def add(self, label: str, points: list[tuple[float, float]], color: str,
            line: bool = True) -> None:
        pts = [(x, y) for x, y in points if x > 0 and y > 0]
        if pts:
            self.series.append((label, sorted(pts), color, line))

    def render(self) -> str:
        xs = [x for _, pts, _, _ in self.series for x, _ in pts] or [1.0]
        ys = [y for _, pts, _, _ in self.series for _, y in pts] or [1.0]
        x0, x1 = min(xs) / 1.3, max(xs) * 1.3
        y0, y1 = min(ys) / 1.3, max(ys) * 1.3

        def px(x: float) -> float:
            return _ML + (math.log10(x) - math.log10(x0)) \
                / (math.log10(x1) - math.log10(x0) or 1) * (_W - _ML - _MR)

        def py(y: float) -> float:
            return _H - _MB - (math.log10(y) - math.log10(y0)) \
                / (math.log10(y1) - math.log10(y0) or 1) * (_H - _MT - _MB)

        out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
               f'font-family="sans-serif" font-size="11">',
               f'<rect width="{_W}" height="{_H}" fill="white"/>',
               f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" '
               f'height="{_H - _MT - _MB}" fill="none" stroke="black"/>']
        for t in _log_ticks(x0, x1):
            x = px(t)
            out.append(f'<line x1="{x:.1f}" y1="{_H - _MB}" x2="{x:.1f}" '
                       f'y2="{_H - _MB + 5}" stroke="black"/>')
            out.append(f'<text x="{x:.1f}" y="{_H - _MB + 18}" '
                       f'text-anchor="middle">1e{int(math.log10(t))}</text>')
        for t in _log_ticks(y0, y1):
            y = py(t)
            out.append(f'<line x1="{_ML - 5}" y1="{y:.1f}" x2="{_ML}" '
                       f'y2="{y:.1f}" stroke="black"/>')
            out.append(f'<text x="{_ML - 8}" y="{y + 4:.1f}" '
                       f'text-anchor="end">1e{int(math.log10(t))}</text>')
        out.append(f'<text x="{(_ML + _W - _MR) / 2}" y="{_H - 12}" '
                   f'text-anchor="middle">{self.xlabel}</text>')
        out.append(f'<text x="16" y="{(_MT + _H - _MB) / 2}" text-anchor="middle" '
                   f'transform="rotate(-90 16 {(_MT + _H - _MB) / 2})">'
                   f'{self.ylabel}</text>')
        if self.title:
            out.append(f'<text x="{_W / 2}" y="{_MT - 5}" '
                       f'text-anchor="middle">{self.title}</text>')
        ly = _MT + 14
        for label, pts, color, line in self.series:
            coords = [(px(x), py(y)) for x, y in pts]
            if line and len(coords) > 1:
                d = " ".join(f"{x:.1f},{y:.1f}" for x, y in coords)
                out.append(f'<polyline points="{d}" fill="none" '
                           f'stroke="{color}" stroke-width="1.5"/>')
            for x, y in coords:
                out.append(f'<circle cx="{x:.1f}" cy="{y:.1f}" r="3" '
                           f'fill="{color}"/>')
            out.append(f'<circle cx="{_W - _MR - 150}" cy="{ly - 4}" r="3" '
                       f'fill="{color}"/>')
            out.append(f'<text x="{_W - _MR - 142}" y="{ly}">{label}</text>')
            ly += 14
        out.append("</svg>")
        return "\n".join(out) + "\n"
