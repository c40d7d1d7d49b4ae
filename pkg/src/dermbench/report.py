"""Evaluation reports: table rendering, ROC point files, SVG and PNG figures.

Rendered table cells are the metrics engine's values, as percentages rounded
half-away-from-zero to two decimals — rendering applies no other transform.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

from . import figures
from .dataset import _atomic_write_text
from .errors import ValidationError
from .metrics import (
    ConfusionMatrix,
    Dominance,
    DominanceResult,
    MacroAverage,
    MacroRoc,
    OperatorPoint,
    PrfTriple,
    RocCurve,
    auc_trapezoid,
    confusion_matrix,
    dominance_check,
    macro_average,
    macro_roc_auc,
    mean_operator_point,
    micro_average,
    micro_roc,
    per_class_prf,
    point_auc,
    read_operator_points,
    roc_curve,
)
from .scores import ScoreMatrix, validate_scores
from .svgplot import SvgStyle, emit_svg
from .taxonomy import ALL_CLASSES, DISPLAY_NAMES, ClassId

logger = logging.getLogger(__name__)

TABLE1_COLUMNS = ["Algorithm", "Mel", "NV", "BCC", "AKIEC", "BK", "DF", "VASC", "Atyp NV", "Macro", "Micro"]
TABLE2_COLUMNS = [
    "Algorithm",
    "Precision Micro", "Precision Macro",
    "F1 Micro", "F1 Macro",
    "ROC AUC Micro", "ROC AUC Macro",
]


def format_percent(x: float) -> str:
    """Percent with 2 decimals, ties rounded half-away-from-zero."""
    return str(Decimal(x * 100).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class EvalReport:
    """Everything the tables and figures for one model are rendered from.

    All 8 canonical classes are present in every mapping; a class whose AUC
    is undefined appears in ``excluded_classes`` and holds None.
    """

    model_name: str
    n_samples: int
    per_class_auc: dict[ClassId, float | None]
    excluded_classes: tuple[ClassId, ...]
    macro_roc: MacroRoc
    micro_auc: float
    micro_curve: RocCurve
    per_class_curves: dict[ClassId, RocCurve]
    per_class_prf: dict[ClassId, PrfTriple]
    micro_prf: PrfTriple
    macro_prf: MacroAverage
    cm: ConfusionMatrix


def build_report(m: ScoreMatrix, model_name: str) -> EvalReport:
    """Run the full metrics battery over one score matrix."""
    cm = confusion_matrix(m)
    triples = {c: per_class_prf(cm, c) for c in ALL_CLASSES}
    macro = macro_roc_auc(m)
    micro_curve = micro_roc(m)
    curves: dict[ClassId, RocCurve] = {}
    aucs: dict[ClassId, float | None] = {}
    for c in ALL_CLASSES:
        if c in macro.per_class_auc:
            curves[c] = roc_curve(m, c)
            aucs[c] = macro.per_class_auc[c]
        else:
            aucs[c] = None
    return EvalReport(
        model_name=model_name,
        n_samples=len(m),
        per_class_auc=aucs,
        excluded_classes=macro.excluded,
        macro_roc=macro,
        micro_auc=auc_trapezoid(micro_curve),
        micro_curve=micro_curve,
        per_class_curves=curves,
        per_class_prf=triples,
        micro_prf=micro_average(cm),
        macro_prf=macro_average([triples[c] for c in ALL_CLASSES]),
        cm=cm,
    )


# ---------------------------------------------------------------------------
# Table rendering


def _render_table(columns: list[str], rows: list[list[str]], fmt: str) -> str:
    if fmt == "csv":
        lines = [",".join(columns)] + [",".join(row) for row in rows]
        return "\n".join(lines) + "\n"
    if fmt == "md":
        lines = [
            "| " + " | ".join(columns) + " |",
            "| " + " | ".join("---" for _ in columns) + " |",
        ]
        lines += ["| " + " | ".join(row) + " |" for row in rows]
        return "\n".join(lines) + "\n"
    raise ValidationError(f"unknown table format {fmt!r}; expected csv or md")


def table1_row(report: EvalReport) -> list[str]:
    """Per-class AUC row: 8 classes then Macro then Micro, as percents."""
    cells = [report.model_name]
    for c in ALL_CLASSES:
        auc = report.per_class_auc[c]
        cells.append("NA" if auc is None else format_percent(auc))
    cells.append(format_percent(report.macro_roc.auc))
    cells.append(format_percent(report.micro_auc))
    return cells


def table2_row(report: EvalReport) -> list[str]:
    return [
        report.model_name,
        format_percent(report.micro_prf.precision),
        format_percent(report.macro_prf.precision),
        format_percent(report.micro_prf.f1),
        format_percent(report.macro_prf.f1),
        format_percent(report.micro_auc),
        format_percent(report.macro_roc.auc),
    ]


def render_table1(reports: list[EvalReport], fmt: str = "csv") -> str:
    return _render_table(TABLE1_COLUMNS, [table1_row(r) for r in reports], fmt)


def render_table2(reports: list[EvalReport], fmt: str = "csv") -> str:
    return _render_table(TABLE2_COLUMNS, [table2_row(r) for r in reports], fmt)


def confusion_csv(cm: ConfusionMatrix, normalized: bool = False) -> str:
    """Counts (or row-normalized shares) with labeled rows and columns."""
    header = "true\\pred," + ",".join(c.code for c in ALL_CLASSES)
    lines = [header]
    norm = cm.row_normalized() if normalized else None
    for c in ALL_CLASSES:
        i = int(c)
        if normalized:
            cells = [repr(float(norm[i, j])) for j in range(len(ALL_CLASSES))]
        else:
            cells = [str(int(cm.counts[i, j])) for j in range(len(ALL_CLASSES))]
        lines.append(c.code + "," + ",".join(cells))
    return "\n".join(lines) + "\n"


def roc_points_csv(curve: RocCurve) -> str:
    """fpr,tpr,threshold rows; floats via repr so parsing round-trips exactly."""
    lines = ["fpr,tpr,threshold"]
    for f, t, thr in zip(curve.fpr, curve.tpr, curve.thresholds):
        lines.append(f"{float(f)!r},{float(t)!r},{float(thr)!r}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Commands


def _model_name_for(score_file: Path, explicit: str | None) -> str:
    return explicit if explicit else score_file.stem


def eval_command(
    score_file: str | Path,
    out_dir: str | Path,
    fmt: str = "csv",
    model_name: str | None = None,
    render_figures: bool = True,
) -> EvalReport:
    """Evaluate one score file and write every report artifact into out_dir."""
    score_file = Path(score_file)
    out_dir = Path(out_dir)
    m = validate_scores(score_file)
    report = build_report(m, _model_name_for(score_file, model_name))
    out_dir.mkdir(parents=True, exist_ok=True)

    ext = "md" if fmt == "md" else "csv"
    _atomic_write_text(out_dir / f"auc_table.{ext}", render_table1([report], fmt))
    _atomic_write_text(out_dir / f"summary_table.{ext}", render_table2([report], fmt))
    _atomic_write_text(out_dir / "confusion_matrix_counts.csv", confusion_csv(report.cm))
    _atomic_write_text(out_dir / "confusion_matrix_rownorm.csv", confusion_csv(report.cm, normalized=True))

    curves, labels = [], []
    for c in ALL_CLASSES:
        if c not in report.per_class_curves:
            continue
        curve = report.per_class_curves[c]
        _atomic_write_text(out_dir / f"roc_points_{c.code}.csv", roc_points_csv(curve))
        auc = report.per_class_auc[c]
        label = f"{DISPLAY_NAMES[c]} (AUC {format_percent(auc)}%)" if auc is not None else DISPLAY_NAMES[c]
        _atomic_write_text(
            out_dir / f"roc_{c.code}.svg",
            emit_svg([curve], labels=[label], style=SvgStyle(title=f"{report.model_name}: {DISPLAY_NAMES[c]}")),
        )
        curves.append(curve)
        labels.append(label)
    _atomic_write_text(
        out_dir / "roc_all_classes.svg",
        emit_svg(curves, labels=labels, style=SvgStyle(title=f"{report.model_name}: per-class ROC")),
    )
    if report.excluded_classes:
        logger.warning(
            "classes excluded from ROC (no positives or no negatives): %s",
            ", ".join(c.code for c in report.excluded_classes),
        )

    if render_figures:
        figures.roc_overview_figure(
            curves, labels, out_dir / "roc_all_classes.png",
            title=f"{report.model_name}: per-class ROC",
        )
        figures.confusion_figure(
            report.cm, out_dir / "confusion_matrix.png",
            title=f"{report.model_name}: confusion matrix (row-normalized)",
        )
    return report


@dataclass(frozen=True)
class ComparisonRow:
    model_name: str
    target_class: ClassId
    model_auc: float
    operator_auc: float
    dominance: DominanceResult


def compare_command(
    score_files: list[str | Path],
    operator_file: str | Path,
    target_classes: list[ClassId],
    out_dir: str | Path,
    fmt: str = "csv",
    render_figures: bool = True,
) -> list[ComparisonRow]:
    """Compare each model's ROC against rater operating points per class.

    Writes a comparison table (rows: the mean rater, then one per model) and
    one overlay SVG/PNG per target class.
    """
    if not score_files:
        raise ValidationError("compare needs at least one score file")
    out_dir = Path(out_dir)
    points = read_operator_points(operator_file)
    matrices = [(Path(f), validate_scores(f)) for f in map(Path, score_files)]
    names = [_model_name_for(path, None) for path, _ in matrices]
    if len(set(names)) != len(names):  # disambiguate colliding stems
        names = [f"{name} ({i + 1})" for i, name in enumerate(names)]

    rows: list[ComparisonRow] = []
    by_model: list[dict[ClassId, ComparisonRow]] = [{} for _ in matrices]
    per_class_curves: dict[ClassId, list[tuple[str, RocCurve, float]]] = {c: [] for c in target_classes}
    means: dict[ClassId, OperatorPoint] = {}
    for c in target_classes:
        means[c] = mean_operator_point(points, c)  # errors if no points for c
        for i, (path, m) in enumerate(matrices):
            try:
                curve = roc_curve(m, c)
            except ValidationError as exc:
                raise ValidationError(f"{path}: {exc}") from None
            auc = auc_trapezoid(curve)
            per_class_curves[c].append((names[i], curve, auc))
            row = ComparisonRow(
                model_name=names[i],
                target_class=c,
                model_auc=auc,
                operator_auc=point_auc(means[c]),
                dominance=dominance_check(curve, means[c]),
            )
            rows.append(row)
            by_model[i][c] = row

    out_dir.mkdir(parents=True, exist_ok=True)
    columns = ["Classifier"] + [DISPLAY_NAMES[c] for c in target_classes] + [
        f"Verdict {DISPLAY_NAMES[c]}" for c in target_classes
    ]
    table_rows = [
        ["Dermatologist"]
        + [format_percent(point_auc(means[c])) for c in target_classes]
        + ["" for _ in target_classes]
    ]
    for i, name in enumerate(names):
        table_rows.append(
            [name]
            + [format_percent(by_model[i][c].model_auc) for c in target_classes]
            + [by_model[i][c].dominance.verdict.value for c in target_classes]
        )
    ext = "md" if fmt == "md" else "csv"
    _atomic_write_text(out_dir / f"comparison_table.{ext}", _render_table(columns, table_rows, fmt))

    for c in target_classes:
        entries = per_class_curves[c]
        labels = [f"{name} (AUC {format_percent(auc)}%)" for name, _, auc in entries]
        curves = [curve for _, curve, _ in entries]
        individual = [p for p in points if p.target_class == c]
        _atomic_write_text(
            out_dir / f"roc_vs_operators_{c.code}.svg",
            emit_svg(
                curves,
                points=individual,
                labels=labels,
                style=SvgStyle(title=f"{DISPLAY_NAMES[c]}: models vs raters"),
                emphasized_points=[means[c]],
            ),
        )
        if render_figures:
            figures.operator_comparison_figure(
                curves, labels, individual, means[c],
                out_dir / f"roc_vs_operators_{c.code}.png",
                title=f"{DISPLAY_NAMES[c]}: models vs raters",
            )
    return rows
