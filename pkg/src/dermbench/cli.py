"""The dermbench command line.

Exit codes: 0 success, 1 validation error (bad data or bad arguments),
2 I/O error. DERMBENCH_SEED supplies a default seed for `split`; an explicit
--seed always wins.
"""
from __future__ import annotations

import logging
import os
import sys
from pathlib import Path

import click

from . import dataset, preprocess, splitter
from .errors import ValidationError
from .report import compare_command, eval_command
from .splitter import SPLIT_ORDER, SplitSpec
from .taxonomy import ALL_CLASSES, PH2_DEFAULT_SELECTION, ClassId, parse_class

logger = logging.getLogger(__name__)


@click.group()
@click.option("--verbose", is_flag=True, help="Enable debug logging.")
def cli(verbose: bool) -> None:
    """Benchmarking harness for 8-class dermoscopy classification."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )


@cli.group()
def manifest() -> None:
    """Manifest construction."""


@manifest.command("build")
@click.option("--ham10000-meta", type=click.Path(path_type=Path), help="HAM10000 metadata CSV.")
@click.option("--ham10000-images", type=click.Path(path_type=Path), help="HAM10000 image directory.")
@click.option("--ph2-index", type=click.Path(path_type=Path), help="PH2 index CSV.")
@click.option("--ph2-images", type=click.Path(path_type=Path), help="PH2 image directory.")
@click.option("--ph2-all-classes", is_flag=True,
              help="Keep PH2 common nevi (mapped to NV) instead of only MEL/ATYP_NV.")
@click.option("--skip-missing", is_flag=True, help="Warn and drop rows whose image file is absent.")
@click.option("-o", "--output", type=click.Path(path_type=Path), required=True)
def manifest_build(
    ham10000_meta: Path | None,
    ham10000_images: Path | None,
    ph2_index: Path | None,
    ph2_images: Path | None,
    ph2_all_classes: bool,
    skip_missing: bool,
    output: Path,
) -> None:
    """Ingest the source datasets and write the merged manifest CSV."""
    if (ham10000_meta is None) != (ham10000_images is None):
        raise ValidationError("--ham10000-meta and --ham10000-images must be given together")
    if (ph2_index is None) != (ph2_images is None):
        raise ValidationError("--ph2-index and --ph2-images must be given together")
    if ham10000_meta is None and ph2_index is None:
        raise ValidationError("nothing to ingest: pass HAM10000 and/or PH2 inputs")

    records: list[dataset.ManifestRecord] = []
    if ham10000_meta is not None:
        ham = dataset.ingest_ham10000(ham10000_meta, ham10000_images, skip_missing=skip_missing)
        click.echo(f"HAM10000: {len(ham)} records")
        records = dataset.merge_manifests(records, ham)
    if ph2_index is not None:
        selection = frozenset(ALL_CLASSES) if ph2_all_classes else PH2_DEFAULT_SELECTION
        ph2 = dataset.ingest_ph2(ph2_index, ph2_images, selection, skip_missing=skip_missing)
        click.echo(f"PH2: {len(ph2)} records")
        records = dataset.merge_manifests(records, ph2)

    dataset.write_manifest(records, output)
    summary = dataset.summarize(records)
    click.echo(f"wrote {summary.total} records to {output}")
    for c, n in summary.per_class_counts.items():
        click.echo(f"  {c.code}: {n}")


@cli.command("split")
@click.option("--manifest", "manifest_path", type=click.Path(path_type=Path), required=True)
@click.option("--seed", type=str, default=None, help="64-bit seed; defaults to $DERMBENCH_SEED.")
@click.option("--fractions", default="0.7,0.15,0.15", show_default=True,
              help="train,val,test fractions (must sum to 1).")
@click.option("--group-by-lesion", is_flag=True, help="Assign whole lesion groups to one split.")
@click.option("-o", "--output", type=click.Path(path_type=Path), required=True)
def split_cmd(manifest_path: Path, seed: str | None, fractions: str,
              group_by_lesion: bool, output: Path) -> None:
    """Stratified 70/15/15 split; deterministic given the seed."""
    if seed is None:
        seed = os.environ.get("DERMBENCH_SEED")
    if seed is None:
        raise ValidationError("no seed: pass --seed or set DERMBENCH_SEED")
    try:
        seed_value = int(seed, 0)
    except ValueError:
        raise ValidationError(f"seed must be an integer, got {seed!r}") from None

    spec = SplitSpec(
        fractions=splitter.parse_fractions(fractions),
        seed=seed_value,
        group_by_lesion=group_by_lesion,
    )
    records = dataset.read_manifest(manifest_path)
    assigned = splitter.stratified_split(records, spec)
    dataset.write_manifest(assigned, output)

    report = splitter.verify_split(assigned) if assigned else None
    click.echo(f"wrote {len(assigned)} records to {output}")
    if report is not None:
        for s in SPLIT_ORDER:
            click.echo(f"  {s.value}: {report.totals[s]} ({report.fractions[s]:.4f})")
        if report.leakage is not None:
            state = "DETECTED" if report.leakage else "none"
            click.echo(f"  lesion leakage across splits: {state}")


@cli.command("preprocess")
@click.option("--manifest", "manifest_path", type=click.Path(path_type=Path), required=True)
@click.option("--size", default="224x224", show_default=True, help="Target WxH, e.g. 299x299.")
@click.option("--skip-undecodable", is_flag=True, help="Warn and drop undecodable images.")
@click.option("-o", "--out-dir", type=click.Path(path_type=Path), required=True)
def preprocess_cmd(manifest_path: Path, size: str, skip_undecodable: bool, out_dir: Path) -> None:
    """Resize every manifest image into OUT_DIR and emit its manifest."""
    try:
        w, h = (int(p) for p in size.lower().split("x"))
    except ValueError:
        raise ValidationError(f"bad --size {size!r}; expected WxH like 224x224") from None
    spec = preprocess.PreprocessSpec(target_size=(w, h))
    records = dataset.read_manifest(manifest_path)
    out = preprocess.preprocess_batch(records, spec, out_dir, skip_undecodable=skip_undecodable)
    click.echo(f"preprocessed {len(out)} images into {out_dir}")


@cli.command("eval")
@click.argument("score_file", type=click.Path(path_type=Path))
@click.option("--model-name", default=None, help="Row label; defaults to the file stem.")
@click.option("--format", "fmt", type=click.Choice(["csv", "md"]), default="csv", show_default=True)
@click.option("--out-dir", type=click.Path(path_type=Path), default=Path("report"), show_default=True)
@click.option("--figures/--no-figures", default=True, show_default=True,
              help="Also render matplotlib PNG figures.")
def eval_cmd(score_file: Path, model_name: str | None, fmt: str, out_dir: Path, figures: bool) -> None:
    """Evaluate a score file: tables, confusion matrices, ROC data and plots."""
    report = eval_command(score_file, out_dir, fmt=fmt, model_name=model_name, render_figures=figures)
    click.echo(f"evaluated {report.n_samples} samples -> {out_dir}")
    click.echo(f"  micro AUC {report.micro_auc:.4f}  macro AUC {report.macro_roc.auc:.4f}")


@cli.command("compare")
@click.argument("score_files", nargs=-1, required=True, type=click.Path(path_type=Path))
@click.option("--operators", type=click.Path(path_type=Path), required=True,
              help="Operator-point CSV: name,target_class,sensitivity,specificity.")
@click.option("--classes", default="MEL,BCC", show_default=True,
              help="Comma-separated target classes.")
@click.option("--format", "fmt", type=click.Choice(["csv", "md"]), default="csv", show_default=True)
@click.option("--out-dir", type=click.Path(path_type=Path), default=Path("report"), show_default=True)
@click.option("--figures/--no-figures", default=True, show_default=True)
def compare_cmd(score_files: tuple[Path, ...], operators: Path, classes: str,
                fmt: str, out_dir: Path, figures: bool) -> None:
    """Compare model ROC curves against rater operating points."""
    try:
        target_classes = [parse_class(c.strip()) for c in classes.split(",") if c.strip()]
    except ValueError as exc:
        raise ValidationError(str(exc)) from None
    if not target_classes:
        raise ValidationError("no target classes given")
    rows = compare_command(
        list(score_files), operators, target_classes, out_dir, fmt=fmt, render_figures=figures,
    )
    click.echo(f"compared {len(score_files)} model(s) on {len(target_classes)} class(es) -> {out_dir}")
    for row in rows:
        click.echo(
            f"  {row.model_name} vs raters on {row.target_class.code}: "
            f"{row.model_auc:.4f} vs {row.operator_auc:.4f} ({row.dominance.verdict.value})"
        )


def main() -> int:
    try:
        cli(standalone_mode=False)
    except click.exceptions.Abort:
        return 1
    except click.ClickException as exc:  # usage/validation of arguments
        exc.show()
        return 1
    except ValidationError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except OSError as exc:
        click.echo(f"I/O error: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
