"""Multi-class evaluation metrics: PRF, micro/macro averaging, ROC/AUC,
and operating-point comparison against human raters.

All operations are pure functions of their inputs. Ties in scores are swept
as single threshold blocks, which makes the trapezoidal area under the ROC
curve equal the tie-aware Mann-Whitney statistic.
"""
from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .scores import ScoreMatrix
from .taxonomy import ALL_CLASSES, NUM_CLASSES, ClassId

# ---------------------------------------------------------------------------
# Confusion matrix and precision/recall/F1


@dataclass(frozen=True)
class ConfusionMatrix:
    """8x8 counts; rows are true classes, columns predicted classes."""

    counts: np.ndarray  # (8, 8) int64

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def support(self, c: ClassId) -> int:
        return int(self.counts[int(c)].sum())

    def row_normalized(self) -> np.ndarray:
        """Rows divided by their support (recall on the diagonal); zero-support
        rows stay all-zero."""
        counts = self.counts.astype(np.float64)
        sums = counts.sum(axis=1, keepdims=True)
        return np.divide(counts, sums, out=np.zeros_like(counts), where=sums > 0)


@dataclass(frozen=True)
class PrfTriple:
    """Precision, recall and F1 with their underlying counts.

    ``degenerate`` marks a class absent from both truths and predictions
    (tp+fp+fn == 0); individually undefined 0/0 ratios come back as 0.0.
    """

    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int
    degenerate: bool = False


def confusion_matrix(m: ScoreMatrix) -> ConfusionMatrix:
    """Tally argmax predictions; score ties resolve to the lowest class index."""
    if len(m) < 1:
        raise ValidationError("confusion matrix needs at least one sample")
    predictions = np.argmax(m.scores, axis=1)  # first max = lowest index
    counts = np.zeros((NUM_CLASSES, NUM_CLASSES), dtype=np.int64)
    np.add.at(counts, (m.truths, predictions), 1)
    return ConfusionMatrix(counts)


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


def _prf_from_counts(tp: int, fp: int, fn: int) -> PrfTriple:
    return PrfTriple(
        precision=_ratio(tp, tp + fp),
        recall=_ratio(tp, tp + fn),
        f1=_ratio(2 * tp, 2 * tp + fp + fn),
        tp=tp,
        fp=fp,
        fn=fn,
        degenerate=(tp + fp + fn == 0),
    )


def per_class_prf(cm: ConfusionMatrix, c: ClassId) -> PrfTriple:
    """One-vs-rest precision/recall/F1 for class c."""
    i = int(c)
    tp = int(cm.counts[i, i])
    fp = int(cm.counts[:, i].sum()) - tp
    fn = int(cm.counts[i, :].sum()) - tp
    return _prf_from_counts(tp, fp, fn)


def micro_average(cm: ConfusionMatrix) -> PrfTriple:
    """PRF over counts pooled across all classes.

    For single-label classification pooled fp == pooled fn, so micro
    precision, recall and F1 all equal accuracy.
    """
    tp = int(np.trace(cm.counts))
    total = cm.total
    return _prf_from_counts(tp, total - tp, total - tp)


@dataclass(frozen=True)
class MacroAverage:
    """Unweighted class means of precision/recall/F1."""

    precision: float
    recall: float
    f1: float
    included: int


def macro_average(triples: Sequence[PrfTriple], include_degenerate: bool = False) -> MacroAverage:
    """Arithmetic mean across classes; degenerate classes excluded by default."""
    kept = [t for t in triples if include_degenerate or not t.degenerate]
    dropped = len(triples) - len(kept)
    if dropped:
        warnings.warn(f"macro average excludes {dropped} degenerate class(es)", stacklevel=2)
    if not kept:
        raise ValidationError("macro average undefined: all classes degenerate")
    n = len(kept)
    return MacroAverage(
        precision=sum(t.precision for t in kept) / n,
        recall=sum(t.recall for t in kept) / n,
        f1=sum(t.f1 for t in kept) / n,
        included=n,
    )


# ---------------------------------------------------------------------------
# ROC / AUC


@dataclass(frozen=True)
class RocCurve:
    """Ordered ROC points, anchored at (0,0) and (1,1).

    ``thresholds[0]`` is +inf for the (0,0) anchor; an averaged curve carries
    NaN thresholds throughout.
    """

    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray

    def __len__(self) -> int:
        return len(self.fpr)


def _binary_roc(scores: np.ndarray, positives: np.ndarray) -> RocCurve:
    """ROC sweep over descending distinct scores; tied scores move as one block."""
    n_pos = int(positives.sum())
    n_neg = len(positives) - n_pos
    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_pos = positives[order].astype(np.int64)
    # Last index of each tie block.
    block_ends = np.flatnonzero(np.r_[np.diff(sorted_scores) != 0, True])
    tp = np.cumsum(sorted_pos)[block_ends]
    fp = (block_ends + 1) - tp
    fpr = np.concatenate(([0.0], fp / n_neg))
    tpr = np.concatenate(([0.0], tp / n_pos))
    thresholds = np.concatenate(([np.inf], sorted_scores[block_ends]))
    return RocCurve(fpr=fpr, tpr=tpr, thresholds=thresholds)


def roc_curve(m: ScoreMatrix, c: ClassId) -> RocCurve:
    """One-vs-rest ROC for class c (positive iff truth == c)."""
    positives = m.truths == int(c)
    n_pos = int(positives.sum())
    if n_pos == 0 or n_pos == len(m):
        raise ValidationError(f"AUC undefined for class {c.code}: needs >=1 positive and >=1 negative")
    return _binary_roc(m.scores[:, int(c)].astype(np.float64), positives)


def micro_roc(m: ScoreMatrix) -> RocCurve:
    """Pool all (sample, class) pairs into one binary problem and sweep it."""
    if len(m) < 1:
        raise ValidationError("micro ROC needs at least one sample")
    onehot = np.zeros((len(m), NUM_CLASSES), dtype=bool)
    onehot[np.arange(len(m)), m.truths] = True
    return _binary_roc(m.scores.ravel().astype(np.float64), onehot.ravel())


def auc_trapezoid(curve: RocCurve) -> float:
    """Trapezoidal integral of tpr over fpr."""
    return float(np.trapezoid(curve.tpr, curve.fpr))


def _as_fpr_function(curve: RocCurve) -> tuple[np.ndarray, np.ndarray]:
    """Reduce a curve to one tpr per distinct fpr (upper envelope), so linear
    interpolation over fpr is well defined across vertical segments."""
    fpr, tpr = curve.fpr, curve.tpr
    last_of_run = np.r_[fpr[1:] != fpr[:-1], True]
    return fpr[last_of_run], tpr[last_of_run]  # tpr non-decreasing: last = max


def interpolate_tpr(curve: RocCurve, at_fpr: np.ndarray | float) -> np.ndarray | float:
    """tpr of the piecewise-linear curve at the given fpr value(s)."""
    xs, ys = _as_fpr_function(curve)
    return np.interp(at_fpr, xs, ys)


@dataclass(frozen=True)
class MacroRoc:
    """Macro ROC AUC under both conventions (interpolated-average primary)."""

    auc: float  # AUC of the pointwise-averaged curve
    mean_of_aucs: float
    curve: RocCurve
    per_class_auc: dict[ClassId, float]
    excluded: tuple[ClassId, ...]


def macro_roc_auc(m: ScoreMatrix) -> MacroRoc:
    """Average per-class curves on the union fpr grid; also report the plain
    mean of per-class AUCs. Classes without both positives and negatives are
    excluded with a warning."""
    curves: dict[ClassId, RocCurve] = {}
    aucs: dict[ClassId, float] = {}
    excluded: list[ClassId] = []
    for c in ALL_CLASSES:
        try:
            curves[c] = roc_curve(m, c)
        except ValidationError:
            excluded.append(c)
            continue
        aucs[c] = auc_trapezoid(curves[c])
    if excluded:
        warnings.warn(
            "macro ROC excludes class(es) without both positives and negatives: "
            + ", ".join(c.code for c in excluded),
            stacklevel=2,
        )
    if not curves:
        raise ValidationError("macro ROC undefined: no class has both positives and negatives")
    grid = np.unique(np.concatenate([curve.fpr for curve in curves.values()]))
    mean_tpr = np.mean([interpolate_tpr(curve, grid) for curve in curves.values()], axis=0)
    averaged = RocCurve(fpr=grid, tpr=mean_tpr, thresholds=np.full(len(grid), np.nan))
    return MacroRoc(
        auc=float(np.trapezoid(mean_tpr, grid)),
        mean_of_aucs=sum(aucs.values()) / len(aucs),
        curve=averaged,
        per_class_auc=aucs,
        excluded=tuple(excluded),
    )


# ---------------------------------------------------------------------------
# Operator (human rater) points


@dataclass(frozen=True)
class OperatorPoint:
    """A single (sensitivity, specificity) operating point for one class."""

    name: str
    sensitivity: float
    specificity: float
    target_class: ClassId

    def __post_init__(self) -> None:
        for attr in ("sensitivity", "specificity"):
            v = getattr(self, attr)
            if not 0.0 <= v <= 1.0:
                raise ValidationError(f"operator {self.name!r}: {attr} {v} outside [0, 1]")


def point_auc(p: OperatorPoint) -> float:
    """AUC of the three-point curve (0,0) -> (1-specificity, sensitivity) -> (1,1).

    The trapezoid area simplifies algebraically to the arithmetic mean, which
    is computed directly so the identity is exact in floating point.
    """
    return (p.sensitivity + p.specificity) / 2


def mean_operator_point(points: Sequence[OperatorPoint], target_class: ClassId) -> OperatorPoint:
    """Average the operating points for one class into a synthetic 'mean' rater."""
    relevant = [p for p in points if p.target_class == target_class]
    if not relevant:
        raise ValidationError(f"no operator points for class {target_class.code}")
    n = len(relevant)
    return OperatorPoint(
        name="mean",
        sensitivity=sum(p.sensitivity for p in relevant) / n,
        specificity=sum(p.specificity for p in relevant) / n,
        target_class=target_class,
    )


def read_operator_points(path: str | Path) -> list[OperatorPoint]:
    """Parse an operator-point CSV: ``name,target_class,sensitivity,specificity``."""
    path = Path(path)
    points: list[OperatorPoint] = []
    with path.open("r", encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        required = {"name", "target_class", "sensitivity", "specificity"}
        missing = required - set(reader.fieldnames or [])
        if missing:
            raise ValidationError(f"{path}: missing operator columns {sorted(missing)}")
        for row_num, row in enumerate(reader, start=2):
            try:
                target = ClassId[row["target_class"]]
            except KeyError:
                raise ValidationError(f"{path}:{row_num}: unknown class {row['target_class']!r}") from None
            try:
                sens = float(row["sensitivity"])
                spec = float(row["specificity"])
            except ValueError:
                raise ValidationError(f"{path}:{row_num}: non-numeric sensitivity/specificity") from None
            try:
                points.append(OperatorPoint(row["name"], sens, spec, target))
            except ValidationError as exc:
                raise ValidationError(f"{path}:{row_num}: {exc}") from None
    return points


class Dominance(Enum):
    MODEL = "model_dominates"
    OPERATOR = "operator_dominates"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class DominanceResult:
    verdict: Dominance
    tpr_at_operator_fpr: float


def dominance_check(curve: RocCurve, p: OperatorPoint) -> DominanceResult:
    """Compare the model curve against the operator at the operator's fpr."""
    tpr_at = float(interpolate_tpr(curve, 1.0 - p.specificity))
    if tpr_at > p.sensitivity:
        verdict = Dominance.MODEL
    elif tpr_at < p.sensitivity:
        verdict = Dominance.OPERATOR
    else:
        verdict = Dominance.INDETERMINATE
    return DominanceResult(verdict=verdict, tpr_at_operator_fpr=tpr_at)
