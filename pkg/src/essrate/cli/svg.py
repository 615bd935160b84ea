"""Standalone SVG renderings of trajectories and stability domains."""

import math
from collections.abc import Sequence

import numpy as np

WIDTH = 640
HEIGHT = 400
MARGIN = 56
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _scale(values: np.ndarray, lo: float, hi: float, start: float, end: float) -> np.ndarray:
    span = hi - lo if hi > lo else 1.0
    return start + (values - lo) / span * (end - start)


def _frame(title: str, x_label: str, y_label: str, ticks: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="20" text-anchor="middle" font-size="14">{title}</text>',
        f'<rect x="{MARGIN}" y="{MARGIN / 2}" width="{WIDTH - 1.5 * MARGIN}" '
        f'height="{HEIGHT - 1.5 * MARGIN}" fill="none" stroke="black"/>',
        f'<text x="{WIDTH / 2}" y="{HEIGHT - 8}" text-anchor="middle" font-size="12">'
        f"{x_label}</text>",
        f'<text x="14" y="{HEIGHT / 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 14 {HEIGHT / 2})">{y_label}</text>',
        ticks,
    ]


def _ticks(x_lo: float, x_hi: float, y_lo: float, y_hi: float, log_y: bool) -> str:
    left, right = MARGIN, WIDTH - MARGIN / 2
    top, bottom = MARGIN / 2, HEIGHT - MARGIN
    y_fmt = (lambda v: f"1e{v:.0f}") if log_y else (lambda v: f"{v:.3g}")
    return "".join(
        [
            f'<text x="{left}" y="{bottom + 16}" font-size="10">{x_lo:.3g}</text>',
            f'<text x="{right}" y="{bottom + 16}" font-size="10" text-anchor="end">'
            f"{x_hi:.3g}</text>",
            f'<text x="{left - 4}" y="{bottom}" font-size="10" text-anchor="end">'
            f"{y_fmt(y_lo)}</text>",
            f'<text x="{left - 4}" y="{top + 10}" font-size="10" text-anchor="end">'
            f"{y_fmt(y_hi)}</text>",
        ]
    )


def line_plot(
    x: Sequence[float] | np.ndarray,
    series: dict[str, Sequence[float] | np.ndarray],
    title: str,
    x_label: str = "t",
    y_label: str = "",
    log_y: bool = False,
) -> str:
    """Render one or more series against a shared abscissa as an SVG document.

    Non-finite points (and nonpositive ones on a log axis) are skipped.
    """
    xs = np.asarray(x, dtype=float)
    cleaned: dict[str, tuple[np.ndarray, np.ndarray]] = {}
    for name, values in series.items():
        ys = np.asarray(values, dtype=float)
        keep = np.isfinite(ys) & np.isfinite(xs)
        if log_y:
            keep &= ys > 0.0
            ys = np.where(keep, np.log10(np.where(keep, ys, 1.0)), math.nan)
        if np.any(keep):
            cleaned[name] = (xs[keep], ys[keep])
    if not cleaned:
        return "\n".join(_frame(title, x_label, y_label, "") + ["</svg>"]) + "\n"

    all_x = np.concatenate([px for px, _ in cleaned.values()])
    all_y = np.concatenate([py for _, py in cleaned.values()])
    x_lo, x_hi = float(all_x.min()), float(all_x.max())
    y_lo, y_hi = float(all_y.min()), float(all_y.max())
    lines = _frame(title, x_label, y_label, _ticks(x_lo, x_hi, y_lo, y_hi, log_y))
    for index, (name, (px, py)) in enumerate(cleaned.items()):
        sx = _scale(px, x_lo, x_hi, MARGIN, WIDTH - MARGIN / 2)
        sy = _scale(py, y_lo, y_hi, HEIGHT - MARGIN, MARGIN / 2)
        points = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(sx, sy, strict=True))
        color = PALETTE[index % len(PALETTE)]
        lines.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{points}"/>'
        )
        lines.append(
            f'<text x="{WIDTH - MARGIN}" y="{MARGIN / 2 + 16 * (index + 1)}" '
            f'font-size="11" text-anchor="end" fill="{color}">{name}</text>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def domain_heatmap(
    grid: np.ndarray,
    re_range: tuple[float, float],
    im_range: tuple[float, float],
    title: str,
) -> str:
    """Render |R(z)| samples as cells shaded by stability; row 0 is the lowest Im."""
    rows, cols = grid.shape
    left, top = MARGIN, MARGIN / 2
    cell_w = (WIDTH - 1.5 * MARGIN) / cols
    cell_h = (HEIGHT - 1.5 * MARGIN) / rows
    ticks = _ticks(re_range[0], re_range[1], im_range[0], im_range[1], log_y=False)
    lines = _frame(title, "Re z", "Im z", ticks)
    for i in range(rows):
        y = top + (rows - 1 - i) * cell_h
        for j in range(cols):
            value = float(grid[i, j])
            if value <= 1.0:
                shade = int(80 + 120 * value)
                fill = f"rgb({shade},{shade},255)"
            else:
                fill = "rgb(245,245,245)"
            lines.append(
                f'<rect x="{left + j * cell_w:.2f}" y="{y:.2f}" width="{cell_w:.2f}" '
                f'height="{cell_h:.2f}" fill="{fill}"/>'
            )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
