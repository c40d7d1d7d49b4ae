"""Score-file parsing and validation.

A score file is the bit-exact contract between the trainer and the metrics
engine: UTF-8 CSV, LF endings, header
``image_id,true_label,MEL,NV,BCC,AKIEC,BKL,DF,VASC,ATYP_NV``, one softmax
row per image with probabilities serialized to at least 9 significant
digits.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .taxonomy import CLASS_CODES, NUM_CLASSES, ClassId

SCORE_HEADER = ["image_id", "true_label", *CLASS_CODES]

ROW_SUM_TOLERANCE = 1e-4


@dataclass(frozen=True)
class ScoreMatrix:
    """N image ids, their true classes, and an N x 8 probability matrix."""

    image_ids: tuple[str, ...]
    truths: np.ndarray  # (N,) int64 of ClassId values
    scores: np.ndarray  # (N, 8) float64

    def __len__(self) -> int:
        return len(self.image_ids)


def score_matrix(image_ids, truths, scores) -> ScoreMatrix:
    """Build a ScoreMatrix from plain sequences (no file-level validation)."""
    truths_arr = np.asarray([int(t) for t in truths], dtype=np.int64)
    scores_arr = np.asarray(scores, dtype=np.float64)
    if scores_arr.ndim != 2 or scores_arr.shape[1] != NUM_CLASSES:
        raise ValidationError(f"scores must be N x {NUM_CLASSES}, got shape {scores_arr.shape}")
    if not (len(image_ids) == len(truths_arr) == scores_arr.shape[0]):
        raise ValidationError("image_ids, truths and scores disagree on N")
    return ScoreMatrix(tuple(str(i) for i in image_ids), truths_arr, scores_arr)


def validate_scores(path: str | Path) -> ScoreMatrix:
    """Parse and validate a score file; every violation names its row."""
    path = Path(path)
    image_ids: list[str] = []
    truths: list[int] = []
    rows: list[list[float]] = []
    seen: set[str] = set()
    with path.open("r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"{path}: empty score file") from None
        if header != SCORE_HEADER:
            raise ValidationError(
                f"{path}: bad header {header!r}; expected {','.join(SCORE_HEADER)}"
            )
        for row_num, row in enumerate(reader, start=2):
            if len(row) != len(SCORE_HEADER):
                raise ValidationError(f"{path}:{row_num}: expected {len(SCORE_HEADER)} fields, got {len(row)}")
            image_id, label = row[0], row[1]
            if image_id in seen:
                raise ValidationError(f"{path}:{row_num}: duplicate image_id {image_id!r}")
            seen.add(image_id)
            try:
                truth = ClassId[label]
            except KeyError:
                raise ValidationError(f"{path}:{row_num}: unknown label {label!r}") from None
            try:
                probs = [float(v) for v in row[2:]]
            except ValueError:
                raise ValidationError(f"{path}:{row_num}: non-numeric probability") from None
            for code, p in zip(CLASS_CODES, probs):
                if not 0.0 <= p <= 1.0:
                    raise ValidationError(f"{path}:{row_num}: {code} probability {p} outside [0, 1]")
            total = sum(probs)
            if abs(total - 1.0) > ROW_SUM_TOLERANCE:
                raise ValidationError(
                    f"{path}:{row_num}: probabilities sum to {total:.6f}, "
                    f"outside 1 +/- {ROW_SUM_TOLERANCE}"
                )
            image_ids.append(image_id)
            truths.append(int(truth))
            rows.append(probs)
    if not rows:
        raise ValidationError(f"{path}: score file has no data rows")
    return ScoreMatrix(tuple(image_ids), np.asarray(truths, dtype=np.int64),
                       np.asarray(rows, dtype=np.float64))


def format_probability(p: float) -> str:
    """Decimal serialization with 10 significant digits (contract: >= 9)."""
    return f"{p:.10g}"


def write_scores(matrix: ScoreMatrix, path: str | Path) -> None:
    """Serialize a ScoreMatrix in the score-file format (LF endings)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(SCORE_HEADER)]
    for image_id, truth, row in zip(matrix.image_ids, matrix.truths, matrix.scores):
        cells = [image_id, ClassId(int(truth)).code, *(format_probability(p) for p in row)]
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="")
