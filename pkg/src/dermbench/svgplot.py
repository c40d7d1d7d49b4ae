"""Hand-rolled SVG 1.1 ROC plots.

Output is a pure function of the inputs (fixed geometry, fixed palette, no
timestamps), so identical calls produce byte-identical documents — the
property the report tests pin down. Raster figures are matplotlib's job, see
``figures``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .metrics import OperatorPoint, RocCurve

# Okabe-Ito palette: colorblind-safe, one slot per class plus extras.
PALETTE = (
    "#0072B2", "#D55E00", "#009E73", "#CC79A7",
    "#E69F00", "#56B4E9", "#F0E442", "#000000",
    "#999999", "#882255",
)


@dataclass(frozen=True)
class SvgStyle:
    width: int = 640
    height: int = 640
    margin: int = 70
    title: str = ""
    x_label: str = "False positive rate"
    y_label: str = "True positive rate"


def _fmt(v: float) -> str:
    return f"{v:.2f}"


class _Doc:
    def __init__(self) -> None:
        self.parts: list[str] = []

    def add(self, element: str) -> None:
        self.parts.append(element)

    def text(self) -> str:
        return "\n".join(self.parts) + "\n"


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def emit_svg(
    curves: Sequence[RocCurve],
    points: Sequence[OperatorPoint] = (),
    labels: Sequence[str] | None = None,
    style: SvgStyle = SvgStyle(),
    emphasized_points: Sequence[OperatorPoint] = (),
) -> str:
    """Render ROC curves and operator points into a standalone SVG document.

    ``labels`` annotates curves in the legend (padded with generic names when
    short); ``emphasized_points`` are drawn larger, for mean-rater markers.
    """
    w, h, m = style.width, style.height, style.margin
    plot_w, plot_h = w - 2 * m, h - 2 * m

    def px(fpr: float) -> float:
        return m + fpr * plot_w

    def py(tpr: float) -> float:
        return h - m - tpr * plot_h

    doc = _Doc()
    doc.add(
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{w}" height="{h}" viewBox="0 0 {w} {h}">'
    )
    doc.add(f'<rect x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>')
    if style.title:
        doc.add(
            f'<text x="{_fmt(w / 2)}" y="{_fmt(m / 2)}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="16">{_escape(style.title)}</text>'
        )

    # Axes box, ticks and grid at 0.0 .. 1.0 step 0.2.
    for i in range(6):
        v = i / 5
        gx, gy = _fmt(px(v)), _fmt(py(v))
        doc.add(
            f'<line x1="{gx}" y1="{_fmt(py(0))}" x2="{gx}" y2="{_fmt(py(1))}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        doc.add(
            f'<line x1="{_fmt(px(0))}" y1="{gy}" x2="{_fmt(px(1))}" y2="{gy}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        doc.add(
            f'<text x="{gx}" y="{_fmt(py(0) + 20)}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{v:.1f}</text>'
        )
        doc.add(
            f'<text x="{_fmt(px(0) - 10)}" y="{_fmt(py(v) + 4)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="12">{v:.1f}</text>'
        )
    doc.add(
        f'<rect x="{_fmt(px(0))}" y="{_fmt(py(1))}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="#000000" stroke-width="1"/>'
    )
    doc.add(
        f'<text x="{_fmt(w / 2)}" y="{_fmt(h - m / 3)}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{_escape(style.x_label)}</text>'
    )
    doc.add(
        f'<text x="{_fmt(m / 3)}" y="{_fmt(h / 2)}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14" '
        f'transform="rotate(-90 {_fmt(m / 3)} {_fmt(h / 2)})">{_escape(style.y_label)}</text>'
    )

    # Chance diagonal.
    doc.add(
        f'<line x1="{_fmt(px(0))}" y1="{_fmt(py(0))}" x2="{_fmt(px(1))}" y2="{_fmt(py(1))}" '
        f'stroke="#888888" stroke-width="1" stroke-dasharray="6,4"/>'
    )

    curve_labels = list(labels) if labels is not None else []
    while len(curve_labels) < len(curves):
        curve_labels.append(f"curve {len(curve_labels) + 1}")

    for idx, curve in enumerate(curves):
        color = PALETTE[idx % len(PALETTE)]
        coords = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in zip(curve.fpr, curve.tpr))
        doc.add(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="2"/>')

    for p in points:
        doc.add(
            f'<circle cx="{_fmt(px(1.0 - p.specificity))}" cy="{_fmt(py(p.sensitivity))}" '
            f'r="4" fill="#555555" stroke="#000000" stroke-width="1"/>'
        )
    for p in emphasized_points:
        doc.add(
            f'<circle cx="{_fmt(px(1.0 - p.specificity))}" cy="{_fmt(py(p.sensitivity))}" '
            f'r="7" fill="#009E73" stroke="#000000" stroke-width="1.5"/>'
        )

    # Legend, lower right inside the axes.
    if curves or points or emphasized_points:
        entries: list[tuple[str, str]] = [
            (curve_labels[i], PALETTE[i % len(PALETTE)]) for i in range(len(curves))
        ]
        if points:
            entries.append(("raters", "#555555"))
        if emphasized_points:
            entries.append(("mean rater", "#009E73"))
        lx = px(1.0) - 190
        ly = py(0.0) - 16 * len(entries) - 14
        for i, (label, color) in enumerate(entries):
            y = ly + 16 * i
            doc.add(
                f'<line x1="{_fmt(lx)}" y1="{_fmt(y - 4)}" x2="{_fmt(lx + 24)}" y2="{_fmt(y - 4)}" '
                f'stroke="{color}" stroke-width="3"/>'
            )
            doc.add(
                f'<text x="{_fmt(lx + 30)}" y="{_fmt(y)}" font-family="sans-serif" '
                f'font-size="12">{_escape(label)}</text>'
            )

    doc.add("</svg>")
    return doc.text()
