"""Writer for the delimited probability file consumed by the evaluator.

One row per scored image: ``image_id,true_label`` followed by the eight
class probabilities in vocabulary order. Probabilities are serialized with
ten significant digits and LF line endings.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .labels import CLASS_CODES, NUM_CLASSES, SCORE_HEADER

ROW_SUM_TOLERANCE = 1e-4


def format_probability(value: float) -> str:
    return format(float(value), ".10g")


def write_scores(
    path: str | Path,
    image_ids: list[str],
    labels: np.ndarray,
    probabilities: np.ndarray,
) -> Path:
    """Write one score row per image; rows keep the given order.

    ``labels`` are class indices. Rows whose probabilities do not sum to
    one within tolerance are refused rather than silently renormalized.
    """
    path = Path(path)
    probs = np.asarray(probabilities, dtype=np.float64)
    if probs.ndim != 2 or probs.shape[1] != NUM_CLASSES:
        raise ValueError(f"expected an (n, {NUM_CLASSES}) probability matrix, got {probs.shape}")
    if not (len(image_ids) == len(labels) == probs.shape[0]):
        raise ValueError(
            f"row count mismatch: {len(image_ids)} ids, {len(labels)} labels, "
            f"{probs.shape[0]} probability rows"
        )
    sums = probs.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > ROW_SUM_TOLERANCE)
    if bad.size:
        first = int(bad[0])
        raise ValueError(
            f"{image_ids[first]}: probabilities sum to {sums[first]:.6f}, not 1"
        )

    lines = [",".join(SCORE_HEADER)]
    for image_id, label, row in zip(image_ids, labels, probs):
        cells = [image_id, CLASS_CODES[int(label)]]
        cells.extend(format_probability(p) for p in row)
        lines.append(",".join(cells))
    with path.open("w", encoding="utf-8", newline="") as f:
        f.write("\n".join(lines) + "\n")
    return path
