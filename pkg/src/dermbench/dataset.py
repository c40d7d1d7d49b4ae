"""Dataset ingestion: HAM10000 + PH2 metadata -> a unified image manifest.

The manifest is the contract every downstream stage consumes. It serializes
to a UTF-8, LF-terminated CSV with the fixed header
``image_id,path,source,label,lesion_id,split`` (plus a trailing ``checksum``
column once preprocessing has run).
"""
from __future__ import annotations

import csv
import logging
import os
import tempfile
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import ValidationError
from .taxonomy import (
    ALL_CLASSES,
    HAM10000_CODE_TABLE,
    PH2_DEFAULT_SELECTION,
    PH2_DIAGNOSIS_TABLE,
    ClassId,
    Source,
    Split,
    parse_class,
)

logger = logging.getLogger(__name__)

MANIFEST_COLUMNS = ["image_id", "path", "source", "label", "lesion_id", "split"]

HAM10000_IMAGE_EXTENSIONS = (".jpg", ".jpeg", ".png")
PH2_IMAGE_EXTENSIONS = (".png", ".jpg", ".jpeg", ".bmp")


@dataclass(frozen=True)
class ManifestRecord:
    """One image in the merged dataset."""

    image_id: str
    path: str
    source: Source
    label: ClassId
    lesion_id: str | None = None
    split: Split | None = None
    checksum: str | None = None


@dataclass(frozen=True)
class DatasetSummary:
    """Exact per-class record tallies."""

    per_class_counts: dict[ClassId, int] = field(default_factory=dict)
    total: int = 0


def _resolve_image(image_dir: Path, stem: str, extensions: tuple[str, ...]) -> Path | None:
    for ext in extensions:
        candidate = image_dir / f"{stem}{ext}"
        if candidate.is_file():
            return candidate
    return None


def _resolve_ph2_image(image_dir: Path, case_id: str) -> Path | None:
    flat = _resolve_image(image_dir, case_id, PH2_IMAGE_EXTENSIONS)
    if flat is not None:
        return flat
    # Layout of the original PH2 distribution.
    nested = image_dir / case_id / f"{case_id}_Dermoscopic_Image"
    if nested.is_dir():
        return _resolve_image(nested, case_id, PH2_IMAGE_EXTENSIONS)
    return None


def ingest_ham10000(
    metadata_file: str | Path,
    image_dir: str | Path,
    *,
    skip_missing: bool = False,
) -> list[ManifestRecord]:
    """Read HAM10000 metadata and return one record per row, in row order.

    The metadata must carry ``image_id``, ``lesion_id`` and ``dx`` columns;
    diagnosis codes are mapped through ``HAM10000_CODE_TABLE``. A row whose
    image file cannot be found is a hard error unless ``skip_missing`` is set,
    in which case it is dropped with a warning (dropped counts are logged,
    never silent).
    """
    metadata_file = Path(metadata_file)
    image_dir = Path(image_dir)
    records: list[ManifestRecord] = []
    dropped = 0
    with metadata_file.open("r", encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        required = {"image_id", "lesion_id", "dx"}
        missing_cols = required - set(reader.fieldnames or [])
        if missing_cols:
            raise ValidationError(
                f"{metadata_file}: missing required columns {sorted(missing_cols)}"
            )
        for row_num, row in enumerate(reader, start=2):
            image_id = (row["image_id"] or "").strip()
            dx = (row["dx"] or "").strip().lower()
            if not image_id:
                raise ValidationError(f"{metadata_file}:{row_num}: empty image_id")
            if dx not in HAM10000_CODE_TABLE:
                raise ValidationError(
                    f"{metadata_file}:{row_num}: unknown diagnosis code {dx!r} "
                    f"for image {image_id!r}"
                )
            path = _resolve_image(image_dir, image_id, HAM10000_IMAGE_EXTENSIONS)
            if path is None:
                if skip_missing:
                    dropped += 1
                    logger.warning("skipping %s: image file not found under %s", image_id, image_dir)
                    continue
                raise FileNotFoundError(
                    f"{metadata_file}:{row_num}: image file for {image_id!r} "
                    f"not found under {image_dir}"
                )
            records.append(
                ManifestRecord(
                    image_id=image_id,
                    path=str(path),
                    source=Source.HAM10000,
                    label=HAM10000_CODE_TABLE[dx],
                    lesion_id=(row["lesion_id"] or "").strip() or None,
                )
            )
    if dropped:
        logger.warning("ingest_ham10000: dropped %d of %d rows (missing files)", dropped, dropped + len(records))
    return records


def _normalize_ph2_diagnosis(raw: str) -> str:
    return " ".join(raw.strip().lower().replace("_", " ").split())


def ingest_ph2(
    index_file: str | Path,
    image_dir: str | Path,
    selected_labels: frozenset[ClassId] | set[ClassId] = PH2_DEFAULT_SELECTION,
    *,
    skip_missing: bool = False,
) -> list[ManifestRecord]:
    """Read a PH2 index CSV and return records for the selected classes.

    The index needs a case-id column (``case_id`` or ``name``) and a
    ``clinical_diagnosis`` column holding either the diagnosis name or the
    PH2 numeric code (0/1/2). Lesions mapping outside ``selected_labels``
    are filtered out; the default selection keeps only MEL and ATYP_NV.
    """
    index_file = Path(index_file)
    image_dir = Path(image_dir)
    selected = frozenset(selected_labels)
    records: list[ManifestRecord] = []
    dropped = 0
    with index_file.open("r", encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        fields = reader.fieldnames or []
        id_col = "case_id" if "case_id" in fields else "name" if "name" in fields else None
        if id_col is None or "clinical_diagnosis" not in fields:
            raise ValidationError(
                f"{index_file}: expected a 'case_id' (or 'name') and a "
                f"'clinical_diagnosis' column, got {fields}"
            )
        for row_num, row in enumerate(reader, start=2):
            case_id = (row[id_col] or "").strip()
            raw_dx = row["clinical_diagnosis"] or ""
            if not case_id or not raw_dx.strip():
                raise ValidationError(f"{index_file}:{row_num}: malformed row {row!r}")
            dx = _normalize_ph2_diagnosis(raw_dx)
            if dx not in PH2_DIAGNOSIS_TABLE:
                raise ValidationError(
                    f"{index_file}:{row_num}: unmapped PH2 diagnosis {raw_dx!r}"
                )
            label = PH2_DIAGNOSIS_TABLE[dx]
            if label not in selected:
                continue
            path = _resolve_ph2_image(image_dir, case_id)
            if path is None:
                if skip_missing:
                    dropped += 1
                    logger.warning("skipping %s: image file not found under %s", case_id, image_dir)
                    continue
                raise FileNotFoundError(
                    f"{index_file}:{row_num}: image file for case {case_id!r} "
                    f"not found under {image_dir}"
                )
            records.append(
                ManifestRecord(
                    image_id=case_id,
                    path=str(path),
                    source=Source.PH2,
                    label=label,
                    lesion_id=case_id,
                )
            )
    if dropped:
        logger.warning("ingest_ph2: dropped %d rows (missing files)", dropped)
    return records


def merge_manifests(a: list[ManifestRecord], b: list[ManifestRecord]) -> list[ManifestRecord]:
    """Concatenate two manifests, rejecting any image_id collision."""
    merged = list(a) + list(b)
    seen: dict[str, int] = {}
    duplicates: list[str] = []
    for rec in merged:
        seen[rec.image_id] = seen.get(rec.image_id, 0) + 1
    duplicates = sorted(image_id for image_id, n in seen.items() if n > 1)
    if duplicates:
        shown = ", ".join(duplicates[:10])
        more = f" (+{len(duplicates) - 10} more)" if len(duplicates) > 10 else ""
        raise ValidationError(f"duplicate image_id across manifests: {shown}{more}")
    return merged


def summarize(manifest: list[ManifestRecord]) -> DatasetSummary:
    """Tally records per class."""
    counts = {c: 0 for c in ALL_CLASSES}
    for rec in manifest:
        counts[rec.label] += 1
    return DatasetSummary(per_class_counts=counts, total=len(manifest))


def _atomic_write_text(path: Path, text: str) -> None:
    """Write via a temp file in the same directory, then rename."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def manifest_to_csv(manifest: list[ManifestRecord]) -> str:
    """Serialize a manifest to its canonical CSV text (LF line endings)."""
    with_checksum = any(rec.checksum is not None for rec in manifest)
    columns = MANIFEST_COLUMNS + (["checksum"] if with_checksum else [])
    lines = [",".join(columns)]
    for rec in manifest:
        cells = [
            rec.image_id,
            rec.path,
            rec.source.value,
            rec.label.code,
            rec.lesion_id or "",
            rec.split.value if rec.split is not None else "",
        ]
        if with_checksum:
            cells.append(rec.checksum or "")
        for cell in cells:
            if any(ch in cell for ch in ",\"\n\r"):
                raise ValidationError(f"manifest field needs quoting, refusing: {cell!r}")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def write_manifest(manifest: list[ManifestRecord], path: str | Path) -> None:
    _atomic_write_text(Path(path), manifest_to_csv(manifest))


def read_manifest(path: str | Path) -> list[ManifestRecord]:
    """Parse a manifest CSV back into records."""
    path = Path(path)
    records: list[ManifestRecord] = []
    with path.open("r", encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        missing = set(MANIFEST_COLUMNS) - set(reader.fieldnames or [])
        if missing:
            raise ValidationError(f"{path}: missing manifest columns {sorted(missing)}")
        for row_num, row in enumerate(reader, start=2):
            try:
                label = parse_class(row["label"])
                source = Source(row["source"])
                split = Split(row["split"]) if row["split"] else None
            except ValueError as exc:
                raise ValidationError(f"{path}:{row_num}: {exc}") from None
            records.append(
                ManifestRecord(
                    image_id=row["image_id"],
                    path=row["path"],
                    source=source,
                    label=label,
                    lesion_id=row["lesion_id"] or None,
                    split=split,
                    checksum=(row.get("checksum") or None),
                )
            )
    return records


def with_split(record: ManifestRecord, split: Split) -> ManifestRecord:
    return replace(record, split=split)
