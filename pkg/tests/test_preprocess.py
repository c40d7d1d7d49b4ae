"""Bilinear resizing checked against an independent scalar reimplementation."""
from __future__ import annotations

import math

import numpy as np
import pytest
from PIL import Image

from dermbench.errors import ValidationError
from dermbench.preprocess import (
    PreprocessSpec,
    checksum_file,
    preprocess_batch,
    resize_image,
)
from dermbench.taxonomy import ClassId, Source
from dermbench.dataset import ManifestRecord


def scalar_bilinear(image: np.ndarray, dst_w: int, dst_h: int) -> np.ndarray:
    """Pure-Python half-pixel bilinear resize; the independent oracle.

    Element-by-element loops over Python floats, structured so each float64
    operation matches the production expression order exactly.
    """
    if image.ndim == 2:
        image = image[:, :, None]
        squeeze = True
    else:
        squeeze = False
    src_h, src_w, channels = image.shape
    out = np.empty((dst_h, dst_w, channels), dtype=np.uint8)
    for dy in range(dst_h):
        sy = (dy + 0.5) * (src_h / dst_h) - 0.5
        y0f = math.floor(sy)
        ty = sy - y0f
        y0 = min(max(int(y0f), 0), src_h - 1)
        y1 = min(max(int(y0f) + 1, 0), src_h - 1)
        for dx in range(dst_w):
            sx = (dx + 0.5) * (src_w / dst_w) - 0.5
            x0f = math.floor(sx)
            tx = sx - x0f
            x0 = min(max(int(x0f), 0), src_w - 1)
            x1 = min(max(int(x0f) + 1, 0), src_w - 1)
            for ch in range(channels):
                v00 = float(image[y0, x0, ch])
                v01 = float(image[y0, x1, ch])
                v10 = float(image[y1, x0, ch])
                v11 = float(image[y1, x1, ch])
                top = v00 * (1.0 - tx) + v01 * tx
                bottom = v10 * (1.0 - tx) + v11 * tx
                value = top * (1.0 - ty) + bottom * ty
                out[dy, dx, ch] = int(math.floor(value + 0.5))
    return out[:, :, 0] if squeeze else out


def quiet_spec(w: int, h: int) -> PreprocessSpec:
    """Build a spec while silencing the non-standard-size advisory."""
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return PreprocessSpec(target_size=(w, h))


class TestResize:
    def test_identity_preserves_pixels(self):
        checker = np.array([[0, 255], [255, 0]], dtype=np.uint8)
        out = resize_image(checker, quiet_spec(2, 2))
        assert np.array_equal(out, checker)

    def test_single_pixel_broadcasts(self):
        one = np.full((1, 1, 3), 7, dtype=np.uint8)
        out = resize_image(one, PreprocessSpec(target_size=(224, 224)))
        assert out.shape == (224, 224, 3)
        assert np.all(out == 7)

    def test_constant_image_stays_constant(self):
        flat = np.full((5, 9, 3), 131, dtype=np.uint8)
        out = resize_image(flat, quiet_spec(13, 4))
        assert np.all(out == 131)

    def test_downscale_matches_oracle(self):
        gradient = np.arange(16, dtype=np.uint8).reshape(4, 4) * 16
        out = resize_image(gradient, quiet_spec(2, 2))
        assert np.array_equal(out, scalar_bilinear(gradient, 2, 2))

    def test_output_shape_is_target(self):
        image = np.zeros((31, 17, 3), dtype=np.uint8)
        out = resize_image(image, PreprocessSpec(target_size=(299, 299)))
        assert out.shape == (299, 299, 3)
        assert out.dtype == np.uint8

    def test_random_rasters_bit_exact(self):
        rng = np.random.RandomState(7)
        for _ in range(25):
            src_h, src_w = rng.randint(1, 9, size=2)
            dst_w, dst_h = rng.randint(1, 13, size=2)
            channels = rng.choice([0, 3])
            shape = (src_h, src_w) if channels == 0 else (src_h, src_w, channels)
            image = rng.randint(0, 256, size=shape).astype(np.uint8)
            out = resize_image(image, quiet_spec(int(dst_w), int(dst_h)))
            oracle = scalar_bilinear(image, int(dst_w), int(dst_h))
            assert np.array_equal(out, oracle), (shape, (dst_w, dst_h))

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValidationError, match="8-bit"):
            resize_image(np.zeros((4, 4), dtype=np.float32), PreprocessSpec((224, 224)))
        with pytest.raises(ValidationError, match="2-D or 3-D"):
            resize_image(np.zeros((4,), dtype=np.uint8), PreprocessSpec((224, 224)))
        with pytest.raises(ValidationError, match="zero-dimension"):
            resize_image(np.zeros((0, 4), dtype=np.uint8), PreprocessSpec((224, 224)))

    def test_nonstandard_size_warns(self):
        with pytest.warns(UserWarning, match="non-standard"):
            PreprocessSpec(target_size=(128, 128))

    def test_nonpositive_size_rejected(self):
        with pytest.raises(ValidationError, match="positive"):
            PreprocessSpec(target_size=(0, 224))


def _write_png(path, array: np.ndarray) -> None:
    Image.fromarray(array, mode="RGB").save(path, format="PNG")


def _record(image_id: str, path, label=ClassId.MEL) -> ManifestRecord:
    return ManifestRecord(image_id=image_id, path=str(path), source=Source.HAM10000,
                          label=label, lesion_id=image_id)


class TestBatch:
    def test_batch_writes_images_and_manifest(self, tmp_path):
        rng = np.random.RandomState(0)
        records = []
        for i in range(3):
            src = tmp_path / f"src{i}.png"
            _write_png(src, rng.randint(0, 256, size=(450, 600, 3)).astype(np.uint8))
            records.append(_record(f"img{i}", src))
        out_dir = tmp_path / "out"
        result = preprocess_batch(records, PreprocessSpec((224, 224)), out_dir)
        assert len(result) == 3
        for rec in result:
            with Image.open(rec.path) as img:
                assert img.size == (224, 224)
            assert rec.checksum == checksum_file(rec.path)
        assert (out_dir / "manifest.csv").is_file()

    def test_batch_is_reproducible(self, tmp_path):
        src = tmp_path / "src.png"
        _write_png(src, np.random.RandomState(1).randint(0, 256, size=(37, 53, 3)).astype(np.uint8))
        records = [_record("img0", src)]
        first = preprocess_batch(records, PreprocessSpec((224, 224)), tmp_path / "a")
        second = preprocess_batch(records, PreprocessSpec((224, 224)), tmp_path / "b")
        assert first[0].checksum == second[0].checksum

    def test_undecodable_is_hard_error_naming_record(self, tmp_path):
        src = tmp_path / "src.png"
        src.write_bytes(b"not an image")
        with pytest.raises(ValidationError, match="imgX"):
            preprocess_batch([_record("imgX", src)], PreprocessSpec((224, 224)), tmp_path / "out")

    def test_skip_undecodable_drops(self, tmp_path, caplog):
        bad = tmp_path / "bad.png"
        bad.write_bytes(b"junk")
        good = tmp_path / "good.png"
        _write_png(good, np.zeros((8, 8, 3), dtype=np.uint8))
        records = [_record("bad", bad), _record("good", good)]
        with caplog.at_level("WARNING"):
            result = preprocess_batch(records, PreprocessSpec((224, 224)), tmp_path / "out",
                                      skip_undecodable=True)
        assert [r.image_id for r in result] == ["good"]
        assert any("bad" in m for m in caplog.messages)
