"""Tiny dependency-free SVG writers for the workbench's plots.

Every plot has a CSV twin; these files are presentation only.  Output is
plain string assembly with fixed formatting, so identical data yields
identical bytes.
"""

from __future__ import annotations

import math

import numpy as np

_W, _H = 640, 420
_ML, _MR, _MT, _MB = 70, 20, 30, 50

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _axis_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    return [lo + (hi - lo) * k / (count - 1) for k in range(count)]


class _Canvas:
    def __init__(self, title: str, xlabel: str, ylabel: str,
                 xlim: tuple[float, float], ylim: tuple[float, float],
                 log_y: bool = False) -> None:
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
            f'viewBox="0 0 {_W} {_H}">',
            f'<rect width="{_W}" height="{_H}" fill="white"/>',
            f'<text x="{_W / 2}" y="18" text-anchor="middle" font-size="14" '
            f'font-family="sans-serif">{title}</text>',
        ]
        self.log_y = log_y
        self.xlim = xlim
        self.ylim = (math.log10(ylim[0]), math.log10(ylim[1])) if log_y else ylim
        self._frame(xlabel, ylabel)

    def x_px(self, x: float) -> float:
        lo, hi = self.xlim
        span = hi - lo if hi > lo else 1.0
        return _ML + (x - lo) / span * (_W - _ML - _MR)

    def y_px(self, y: float) -> float:
        if self.log_y:
            y = math.log10(max(y, 1e-300))
        lo, hi = self.ylim
        span = hi - lo if hi > lo else 1.0
        return _H - _MB - (y - lo) / span * (_H - _MT - _MB)

    def _frame(self, xlabel: str, ylabel: str) -> None:
        x0, x1 = _ML, _W - _MR
        y0, y1 = _H - _MB, _MT
        self.parts.append(
            f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" '
            f'fill="none" stroke="black"/>'
        )
        for tx in _axis_ticks(*self.xlim):
            px = self.x_px(tx)
            self.parts.append(
                f'<line x1="{px:.1f}" y1="{y0}" x2="{px:.1f}" y2="{y0 + 5}" stroke="black"/>'
            )
            self.parts.append(
                f'<text x="{px:.1f}" y="{y0 + 18}" text-anchor="middle" font-size="11" '
                f'font-family="sans-serif">{_fmt(tx)}</text>'
            )
        for ty in _axis_ticks(*self.ylim):
            py = _H - _MB - (ty - self.ylim[0]) / (
                (self.ylim[1] - self.ylim[0]) or 1.0
            ) * (_H - _MT - _MB)
            label = 10**ty if self.log_y else ty
            self.parts.append(
                f'<line x1="{x0 - 5}" y1="{py:.1f}" x2="{x0}" y2="{py:.1f}" stroke="black"/>'
            )
            self.parts.append(
                f'<text x="{x0 - 8}" y="{py + 4:.1f}" text-anchor="end" font-size="11" '
                f'font-family="sans-serif">{label:.3g}</text>'
            )
        self.parts.append(
            f'<text x="{(_ML + _W - _MR) / 2}" y="{_H - 12}" text-anchor="middle" '
            f'font-size="12" font-family="sans-serif">{xlabel}</text>'
        )
        self.parts.append(
            f'<text x="16" y="{(_MT + _H - _MB) / 2}" text-anchor="middle" font-size="12" '
            f'font-family="sans-serif" transform="rotate(-90 16 {(_MT + _H - _MB) / 2})">'
            f"{ylabel}</text>"
        )

    def render(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def line_plot(path, series: dict[str, tuple], title: str, xlabel: str, ylabel: str,
              log_y: bool = False) -> None:
    """Polyline chart; series maps label -> (x array, y array)."""
    xs = np.concatenate([np.asarray(s[0], dtype=float) for s in series.values()])
    ys = np.concatenate([np.asarray(s[1], dtype=float) for s in series.values()])
    finite = np.isfinite(ys)
    ylo, yhi = (float(ys[finite].min()), float(ys[finite].max())) if finite.any() else (0, 1)
    if log_y:
        positive = ys[finite & (ys > 0)]
        ylo = float(positive.min()) if positive.size else 1e-3
        yhi = float(positive.max()) if positive.size else 1.0
    canvas = _Canvas(title, xlabel, ylabel, (float(xs.min()), float(xs.max())),
                     (ylo, yhi), log_y=log_y)
    for k, (label, (sx, sy)) in enumerate(series.items()):
        color = _PALETTE[k % len(_PALETTE)]
        pts = " ".join(
            f"{canvas.x_px(float(x)):.1f},{canvas.y_px(float(y)):.1f}"
            for x, y in zip(sx, sy)
            if math.isfinite(float(y)) and (not log_y or float(y) > 0)
        )
        canvas.parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        canvas.parts.append(
            f'<text x="{_W - _MR - 6}" y="{_MT + 16 + 14 * k}" text-anchor="end" '
            f'font-size="11" font-family="sans-serif" fill="{color}">{label}</text>'
        )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(canvas.render())


def spectrum_plot(path, energies: np.ndarray, classes: np.ndarray | None,
                  title: str) -> None:
    """Energies vs. ascending rank, colored by solution class."""
    order = np.argsort(energies, kind="stable")
    ranks = np.arange(order.size, dtype=float)
    sorted_e = energies[order]
    canvas = _Canvas(title, "rank", "energy",
                     (0.0, float(max(order.size - 1, 1))),
                     (float(sorted_e.min()), float(sorted_e.max())))
    colors = {0: "#2ca02c", 1: "#1f77b4", 2: "#444444"}
    for pos in range(order.size):
        cls = int(classes[order[pos]]) if classes is not None else 2
        canvas.parts.append(
            f'<circle cx="{canvas.x_px(ranks[pos]):.1f}" '
            f'cy="{canvas.y_px(float(sorted_e[pos])):.1f}" r="1.6" '
            f'fill="{colors.get(cls, "#444444")}"/>'
        )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(canvas.render())


def heatmap(path, betas: np.ndarray, gammas: np.ndarray, grid: np.ndarray,
            title: str) -> None:
    """Landscape raster; rows are beta (vertical axis), columns gamma."""
    lo, hi = float(grid.min()), float(grid.max())
    span = (hi - lo) or 1.0
    canvas = _Canvas(title, "gamma", "beta",
                     (float(gammas[0]), float(gammas[-1])),
                     (float(betas[0]), float(betas[-1])))
    nb, ng = grid.shape
    cell_w = (_W - _ML - _MR) / ng
    cell_h = (_H - _MT - _MB) / nb
    for i in range(nb):
        for j in range(ng):
            t = (grid[i, j] - lo) / span
            # Blue (low) to yellow (high).
            r = int(255 * t)
            g = int(255 * (0.3 + 0.7 * t))
            b = int(255 * (1.0 - t))
            x = _ML + j * cell_w
            y = _H - _MB - (i + 1) * cell_h
            canvas.parts.append(
                f'<rect x="{x:.2f}" y="{y:.2f}" width="{cell_w + 0.5:.2f}" '
                f'height="{cell_h + 0.5:.2f}" fill="rgb({r},{g},{b})"/>'
            )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(canvas.render())
