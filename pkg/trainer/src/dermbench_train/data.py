"""Manifest parsing and image loading for training runs.

The manifest is the split-assignment file produced upstream: a comma
delimited table whose ``image_id``, ``label``, and ``split`` columns drive
the run. Extra columns are ignored. Images are the preprocessed rasters
named ``<image_id>.png`` inside one directory.

All image decoding funnels through :func:`load_image` so file access can be
audited in tests.
"""
from __future__ import annotations

import csv
from pathlib import Path
from typing import NamedTuple

import numpy as np
from PIL import Image

from .labels import CLASS_CODES, CODE_TO_INDEX

SPLITS = ("TRAIN", "VAL", "TEST")
_REQUIRED_COLUMNS = {"image_id", "label", "split"}


class ManifestRecord(NamedTuple):
    image_id: str
    label: int
    split: str


def read_manifest(path: str | Path) -> list[ManifestRecord]:
    """Read split assignments, preserving file order."""
    path = Path(path)
    records: list[ManifestRecord] = []
    seen: set[str] = set()
    with path.open("r", encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        missing = _REQUIRED_COLUMNS - set(reader.fieldnames or [])
        if missing:
            raise ValueError(
                f"{path.name}: missing manifest column(s): {', '.join(sorted(missing))}"
            )
        for line_no, row in enumerate(reader, start=2):
            image_id = (row["image_id"] or "").strip()
            label = (row["label"] or "").strip()
            split = (row["split"] or "").strip()
            if not image_id:
                raise ValueError(f"{path.name}:{line_no}: empty image_id")
            if image_id in seen:
                raise ValueError(f"{path.name}:{line_no}: duplicate image_id {image_id!r}")
            if label not in CODE_TO_INDEX:
                raise ValueError(
                    f"{path.name}:{line_no}: unknown label {label!r}; "
                    f"expected one of {', '.join(CLASS_CODES)}"
                )
            if split not in SPLITS:
                raise ValueError(
                    f"{path.name}:{line_no}: unknown split {split!r}; "
                    f"expected one of {', '.join(SPLITS)}"
                )
            seen.add(image_id)
            records.append(ManifestRecord(image_id, CODE_TO_INDEX[label], split))
    return records


def split_records(records: list[ManifestRecord], split: str) -> list[ManifestRecord]:
    """Records assigned to one split, in manifest order."""
    if split not in SPLITS:
        raise ValueError(f"unknown split {split!r}; expected one of {', '.join(SPLITS)}")
    return [r for r in records if r.split == split]


def load_image(path: str | Path, input_size: int) -> np.ndarray:
    """Decode one image as float32 RGB with values in [0, 255].

    The raster must already be square at the recipe's input size; resizing
    belongs to the preprocessing step, not the trainer.
    """
    path = Path(path)
    with Image.open(path) as img:
        img = img.convert("RGB")
        if img.size != (input_size, input_size):
            raise ValueError(
                f"{path.name}: expected {input_size}x{input_size}, "
                f"got {img.size[0]}x{img.size[1]}"
            )
        return np.asarray(img, dtype=np.float32)


def normalize(batch: np.ndarray, mode: str) -> np.ndarray:
    """Map raw [0, 255] pixels to the convention named by ``mode``.

    ``tf``, ``caffe``, and ``torch`` follow the pretrained-weight
    conventions of the respective backbone families; ``unit`` is a plain
    scale to [0, 1] used by lightweight test models.
    """
    if mode == "unit":
        return batch / 255.0
    # heavy import kept out of manifest-only code paths
    from keras.applications.imagenet_utils import preprocess_input

    return preprocess_input(batch, mode=mode, data_format="channels_last")


def load_split(
    records: list[ManifestRecord],
    images_dir: str | Path,
    split: str,
    input_size: int,
    mode: str,
) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """Load every image of one split as a normalized batch.

    Returns (images, labels, image_ids) with rows in manifest order.
    Raises ValueError when any listed image file is absent.
    """
    images_dir = Path(images_dir)
    subset = split_records(records, split)
    missing = [r.image_id for r in subset if not (images_dir / f"{r.image_id}.png").is_file()]
    if missing:
        shown = ", ".join(missing[:5]) + ("..." if len(missing) > 5 else "")
        raise ValueError(
            f"{split}: manifest lists {len(subset)} image(s) but "
            f"{len(missing)} are missing from {images_dir}: {shown}"
        )
    if not subset:
        empty = np.zeros((0, input_size, input_size, 3), dtype=np.float32)
        return empty, np.zeros((0,), dtype=np.int64), []
    batch = np.stack(
        [load_image(images_dir / f"{r.image_id}.png", input_size) for r in subset]
    )
    labels = np.array([r.label for r in subset], dtype=np.int64)
    return normalize(batch, mode), labels, [r.image_id for r in subset]
