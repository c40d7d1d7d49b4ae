"""Matplotlib renderings of the report figures (PNG).

These complement the deterministic SVG output: nicer to eyeball, not part of
the byte-exactness contract. matplotlib is imported lazily so library users
who never render figures don't pay for it.
"""
from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np

from .metrics import ConfusionMatrix, OperatorPoint, RocCurve
from .taxonomy import ALL_CLASSES, DISPLAY_NAMES


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def roc_overview_figure(
    curves: Sequence[RocCurve],
    labels: Sequence[str],
    path: str | Path,
    title: str = "ROC curves",
) -> None:
    """All curves on one [0,1]^2 panel with the chance diagonal."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.5, 6.5))
    ax.plot([0, 1], [0, 1], linestyle="--", color="grey", linewidth=1)
    for curve, label in zip(curves, labels):
        ax.plot(curve.fpr, curve.tpr, linewidth=1.6, label=label)
    ax.set_xlim(-0.02, 1.02)
    ax.set_ylim(-0.02, 1.02)
    ax.set_xlabel("False positive rate")
    ax.set_ylabel("True positive rate")
    ax.set_title(title)
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def confusion_figure(cm: ConfusionMatrix, path: str | Path, title: str = "Confusion matrix") -> None:
    """Row-normalized heatmap annotated with per-cell recall shares."""
    plt = _pyplot()
    norm = cm.row_normalized()
    names = [DISPLAY_NAMES[c] for c in ALL_CLASSES]
    fig, ax = plt.subplots(figsize=(7.5, 6.5))
    im = ax.imshow(norm, cmap="Blues", vmin=0.0, vmax=1.0)
    ax.set_xticks(range(len(names)), names, rotation=45, ha="right")
    ax.set_yticks(range(len(names)), names)
    ax.set_xlabel("Predicted")
    ax.set_ylabel("True")
    ax.set_title(title)
    for i in range(norm.shape[0]):
        for j in range(norm.shape[1]):
            color = "white" if norm[i, j] > 0.5 else "black"
            ax.text(j, i, f"{norm[i, j]:.2f}", ha="center", va="center", fontsize=8, color=color)
    fig.colorbar(im, ax=ax, fraction=0.046)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def operator_comparison_figure(
    curves: Sequence[RocCurve],
    labels: Sequence[str],
    points: Sequence[OperatorPoint],
    mean_point: OperatorPoint,
    path: str | Path,
    title: str,
) -> None:
    """Model curves overlaid with individual rater points and their mean."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.5, 6.5))
    ax.plot([0, 1], [0, 1], linestyle="--", color="grey", linewidth=1)
    for curve, label in zip(curves, labels):
        ax.plot(curve.fpr, curve.tpr, linewidth=1.6, label=label)
    if points:
        xs = np.array([1.0 - p.specificity for p in points])
        ys = np.array([p.sensitivity for p in points])
        ax.scatter(xs, ys, marker="o", s=25, color="dimgrey", zorder=3, label="raters")
    ax.scatter(
        [1.0 - mean_point.specificity], [mean_point.sensitivity],
        marker="o", s=110, color="#009E73", edgecolor="black", zorder=4, label="mean rater",
    )
    ax.set_xlim(-0.02, 1.02)
    ax.set_ylim(-0.02, 1.02)
    ax.set_xlabel("False positive rate")
    ax.set_ylabel("True positive rate")
    ax.set_title(title)
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
