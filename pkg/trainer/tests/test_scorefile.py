"""Score-file serialization: layout, precision, and refusal cases."""
from __future__ import annotations

import numpy as np
import pytest

from dermbench_train.scorefile import ROW_SUM_TOLERANCE, format_probability, write_scores


def test_header_and_row_layout(tmp_path):
    probs = np.array(
        [
            [0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
        ]
    )
    path = write_scores(tmp_path / "s.csv", ["i1", "i2"], np.array([0, 7]), probs)
    text = path.read_text(encoding="utf-8")
    assert "\r" not in text
    assert text.endswith("\n")
    lines = text.splitlines()
    assert lines[0] == "image_id,true_label,MEL,NV,BCC,AKIEC,BKL,DF,VASC,ATYP_NV"
    assert lines[1] == "i1,MEL,0.5,0.5,0,0,0,0,0,0"
    assert lines[2] == "i2,ATYP_NV,0,0,0,0,0,0,0,1"


def test_probabilities_round_trip_to_ten_digits(tmp_path):
    rng = np.random.default_rng(5)
    raw = rng.random((4, 8))
    probs = raw / raw.sum(axis=1, keepdims=True)
    path = write_scores(tmp_path / "s.csv", [f"x{i}" for i in range(4)], np.zeros(4, int), probs)
    lines = path.read_text(encoding="utf-8").splitlines()[1:]
    parsed = np.array([[float(v) for v in line.split(",")[2:]] for line in lines])
    assert np.allclose(parsed, probs, atol=1e-9)


def test_format_probability_significant_digits():
    assert format_probability(1.0) == "1"
    assert format_probability(0.0) == "0"
    assert format_probability(0.123456789012345) == "0.123456789"
    assert format_probability(1.0 / 3.0) == "0.3333333333"


def test_row_sum_violation_refused(tmp_path):
    probs = np.full((1, 8), 0.25)  # sums to 2
    with pytest.raises(ValueError, match="bad_row.*sum to 2.0"):
        write_scores(tmp_path / "s.csv", ["bad_row"], np.array([0]), probs)


def test_row_sum_tolerance_boundary(tmp_path):
    probs = np.full((1, 8), 0.125)
    probs[0, 0] += ROW_SUM_TOLERANCE / 2  # still inside tolerance
    write_scores(tmp_path / "ok.csv", ["r"], np.array([0]), probs)
    probs[0, 0] += ROW_SUM_TOLERANCE * 2  # now outside
    with pytest.raises(ValueError, match="sum to"):
        write_scores(tmp_path / "bad.csv", ["r"], np.array([0]), probs)


def test_shape_mismatches_refused(tmp_path):
    good = np.full((2, 8), 0.125)
    with pytest.raises(ValueError, match="row count mismatch"):
        write_scores(tmp_path / "s.csv", ["only_one"], np.array([0, 1]), good)
    with pytest.raises(ValueError, match=r"expected an \(n, 8\)"):
        write_scores(tmp_path / "s.csv", ["a", "b"], np.array([0, 1]), np.full((2, 7), 1 / 7))
