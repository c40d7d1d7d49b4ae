"""Deterministic image resizing to model input resolutions.

Resampling is owned here, not by any deep-learning runtime, so that the
pixel pipeline is bit-exactly reproducible. The resampler is bilinear with
half-pixel centers:

    src = (dst + 0.5) * (src_size / dst_size) - 0.5

evaluated per axis in IEEE float64; the four neighbours are clamped to the
image, lerped horizontally then vertically as

    top    = v00*(1-tx) + v01*tx
    bottom = v10*(1-tx) + v11*tx
    out    = top*(1-ty) + bottom*ty

and rounded half-away-from-zero (floor(x + 0.5) for the non-negative range)
back to 8 bits. Channels are processed independently.
"""
from __future__ import annotations

import hashlib
import logging
import warnings
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .dataset import ManifestRecord, write_manifest
from .errors import ValidationError

logger = logging.getLogger(__name__)

STANDARD_SIZES = ((299, 299), (224, 224))


class Interpolation(str, Enum):
    BILINEAR = "BILINEAR"


class OutputFormat(str, Enum):
    PNG = "PNG"


@dataclass(frozen=True)
class PreprocessSpec:
    """Target (width, height) plus the fixed resampling/encoding choices."""

    target_size: tuple[int, int]
    interpolation: Interpolation = Interpolation.BILINEAR
    output_format: OutputFormat = OutputFormat.PNG

    def __post_init__(self) -> None:
        w, h = self.target_size
        if w < 1 or h < 1:
            raise ValidationError(f"target_size must be positive, got {self.target_size}")
        if self.target_size not in STANDARD_SIZES:
            warnings.warn(
                f"non-standard target size {self.target_size}; the benchmark "
                f"recipes use 299x299 or 224x224",
                stacklevel=2,
            )


def _axis_coords(dst_size: int, src_size: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (lo index, hi index, hi weight) for one axis."""
    scale = src_size / dst_size
    src = (np.arange(dst_size, dtype=np.float64) + 0.5) * scale - 0.5
    lo = np.floor(src)
    t = src - lo
    lo_idx = np.clip(lo, 0, src_size - 1).astype(np.intp)
    hi_idx = np.clip(lo + 1, 0, src_size - 1).astype(np.intp)
    return lo_idx, hi_idx, t


def resize_image(image: np.ndarray, spec: PreprocessSpec) -> np.ndarray:
    """Resize an (H, W) or (H, W, C) uint8 raster to spec.target_size.

    Output is uint8 with shape (target_h, target_w[, C]); bit-exact per the
    module docstring's formula.
    """
    if image.ndim not in (2, 3):
        raise ValidationError(f"expected a 2-D or 3-D raster, got shape {image.shape}")
    if image.shape[0] < 1 or image.shape[1] < 1:
        raise ValidationError(f"zero-dimension image: shape {image.shape}")
    if image.dtype != np.uint8:
        raise ValidationError(f"expected an 8-bit image, got dtype {image.dtype}")
    dst_w, dst_h = spec.target_size
    src_h, src_w = image.shape[:2]

    y0, y1, ty = _axis_coords(dst_h, src_h)
    x0, x1, tx = _axis_coords(dst_w, src_w)

    squeeze = image.ndim == 2
    data = image[:, :, np.newaxis].astype(np.float64) if squeeze else image.astype(np.float64)

    tx_col = tx[np.newaxis, :, np.newaxis]
    ty_col = ty[:, np.newaxis, np.newaxis]
    v00 = data[np.ix_(y0, x0)]
    v01 = data[np.ix_(y0, x1)]
    v10 = data[np.ix_(y1, x0)]
    v11 = data[np.ix_(y1, x1)]
    top = v00 * (1.0 - tx_col) + v01 * tx_col
    bottom = v10 * (1.0 - tx_col) + v11 * tx_col
    out = top * (1.0 - ty_col) + bottom * ty_col

    out = np.floor(out + 0.5).astype(np.uint8)  # convex combo stays in [0, 255]
    return out[:, :, 0] if squeeze else out


def checksum_file(path: str | Path) -> str:
    """SHA-256 of the file contents, lowercase hex."""
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def preprocess_batch(
    manifest: list[ManifestRecord],
    spec: PreprocessSpec,
    out_dir: str | Path,
    *,
    skip_undecodable: bool = False,
) -> list[ManifestRecord]:
    """Resize every manifest image into out_dir and return the new manifest.

    Each output is ``<image_id>.png`` with a SHA-256 checksum recorded on its
    record. Undecodable inputs are hard errors naming the record, unless
    ``skip_undecodable`` drops them (the output manifest mirrors the drop).
    The output manifest is also written to ``out_dir/manifest.csv``.
    """
    from PIL import Image, UnidentifiedImageError

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_records: list[ManifestRecord] = []
    for rec in manifest:
        try:
            with Image.open(rec.path) as img:
                array = np.asarray(img.convert("RGB"), dtype=np.uint8)
        except (UnidentifiedImageError, OSError, ValueError) as exc:
            if skip_undecodable:
                logger.warning("skipping undecodable image %s (%s)", rec.image_id, exc)
                continue
            raise ValidationError(f"cannot decode image for record {rec.image_id!r}: {exc}") from exc
        resized = resize_image(array, spec)
        out_path = out_dir / f"{rec.image_id}.png"
        Image.fromarray(resized, mode="RGB").save(out_path, format=spec.output_format.value)
        out_records.append(
            ManifestRecord(
                image_id=rec.image_id,
                path=str(out_path),
                source=rec.source,
                label=rec.label,
                lesion_id=rec.lesion_id,
                split=rec.split,
                checksum=checksum_file(out_path),
            )
        )
    write_manifest(out_records, out_dir / "manifest.csv")
    return out_records
