"""Training-loop behavior with lightweight models: checkpointing, logging,
reproducibility, and the file-access discipline of the full pipeline."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

import dermbench_train.data as data
import dermbench_train.runner as runner
from dermbench_train.recipes import get_recipe
from dermbench_train.train import predict_scores, train
from util_train import build_dataset, stratified_rows, tiny_model


def _random_batch(n, size=32, seed=0, classes=8):
    rng = np.random.default_rng(seed)
    x = rng.random((n, size, size, 3), dtype=np.float32)
    y = rng.integers(0, classes, size=n).astype(np.int64)
    return x, y


def test_single_epoch_writes_checkpoint_and_log(tmp_path):
    x, y = _random_batch(16)
    xv, yv = _random_batch(4, seed=1)
    result = train(
        tiny_model(), (x, y), (xv, yv), tmp_path,
        learning_rate=0.01, epochs=1, batch_size=8, seed=7,
    )
    assert result.checkpoint_path == tmp_path / "checkpoint.weights.h5"
    assert result.checkpoint_path.is_file()
    assert result.best_epoch == 1
    log = json.loads(result.log_path.read_text(encoding="utf-8"))
    assert log["seed"] == 7
    assert log["deterministic"] is False
    assert log["normalization"] == "unit"
    assert log["hyperparameters"] == {
        "learning_rate": 0.01, "momentum": 0.9, "decay": 1e-6,
        "epochs": 1, "batch_size": 8,
    }
    assert len(log["epochs_run"]) == 1
    row = log["epochs_run"][0]
    assert set(row) == {"epoch", "loss", "accuracy", "val_loss", "val_accuracy"}
    assert row["epoch"] == 1
    assert row["loss"] > 0.0


def test_loss_decreases_on_identical_images(tmp_path):
    # one repeated image with one label: five SGD epochs must make progress
    x = np.tile(np.full((1, 32, 32, 3), 0.4, dtype=np.float32), (16, 1, 1, 1))
    y = np.full(16, 3, dtype=np.int64)
    result = train(
        tiny_model(), (x, y), (x[:4], y[:4]), tmp_path,
        learning_rate=0.05, epochs=5, batch_size=16, seed=3,
    )
    losses = [row["loss"] for row in result.history]
    assert len(losses) == 5
    assert losses[4] < losses[0]


def test_seeded_rerun_reproduces_first_epoch_loss(tmp_path):
    import keras

    def one_run(out):
        keras.utils.set_random_seed(11)
        x, y = _random_batch(12, seed=2)
        xv, yv = _random_batch(4, seed=4)
        result = train(
            tiny_model(), (x, y), (xv, yv), out,
            learning_rate=0.02, epochs=1, batch_size=4, seed=11, deterministic=True,
        )
        return result.history[0]["loss"]

    first = one_run(tmp_path / "a")
    second = one_run(tmp_path / "b")
    assert abs(first - second) <= 1e-6


def test_empty_train_split_rejected(tmp_path):
    x, y = _random_batch(4)
    with pytest.raises(ValueError, match="TRAIN split is empty"):
        train(
            tiny_model(), (x[:0], y[:0]), (x, y), tmp_path,
            learning_rate=0.01, epochs=1, batch_size=4,
        )


def test_empty_val_split_rejected(tmp_path):
    x, y = _random_batch(4)
    with pytest.raises(ValueError, match="VAL split is empty"):
        train(
            tiny_model(), (x, y), (x[:0], y[:0]), tmp_path,
            learning_rate=0.01, epochs=1, batch_size=4,
        )


def test_checkpoint_holds_best_epoch_weights(tmp_path):
    import keras

    # a large learning rate makes validation loss bounce, so the best
    # epoch is usually not the last; the checkpoint must match it exactly
    keras.utils.set_random_seed(13)
    x, y = _random_batch(24, seed=5)
    xv, yv = _random_batch(8, seed=6)
    model = tiny_model()
    result = train(
        model, (x, y), (xv, yv), tmp_path,
        learning_rate=0.5, epochs=4, batch_size=4, seed=13,
    )
    val_losses = [row["val_loss"] for row in result.history]
    assert result.best_epoch == int(np.argmin(val_losses)) + 1
    assert result.best_val_loss == min(val_losses)

    fresh = tiny_model()
    fresh.load_weights(result.checkpoint_path)
    fresh.compile(loss="sparse_categorical_crossentropy")
    evaluated = fresh.evaluate(xv, yv, batch_size=4, verbose=0)
    assert abs(evaluated - result.best_val_loss) < 1e-5


def test_predict_scores_shape_and_row_sums():
    x, _ = _random_batch(10)
    probs = predict_scores(tiny_model(), x, batch_size=4)
    assert probs.shape == (10, 8)
    assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-4)
    with pytest.raises(ValueError, match="no images"):
        predict_scores(tiny_model(), x[:0], batch_size=4)


def test_pipeline_never_reads_test_images_during_training(tmp_path, monkeypatch):
    """File-access audit: every TEST image read happens after fitting ends."""
    rows = stratified_rows({"TRAIN": 1, "VAL": 1, "TEST": 1})  # 8 per split
    manifest, images = build_dataset(tmp_path, rows, size=224)

    events: list[tuple] = []
    real_load = data.load_image
    real_train = runner.train

    def spy_load(path, input_size):
        events.append(("load", Path(path).name))
        return real_load(path, input_size)

    def spy_train(*args, **kwargs):
        events.append(("fit_start",))
        result = real_train(*args, **kwargs)
        events.append(("fit_end",))
        return result

    monkeypatch.setattr(data, "load_image", spy_load)
    monkeypatch.setattr(runner, "train", spy_train)
    monkeypatch.setattr(runner, "build_model", lambda recipe, weights=None: tiny_model(224))

    recipe = get_recipe("densenet201", epochs=1, batch_size=4)
    runner.run(recipe, manifest, images, tmp_path / "scores.csv", seed=1, weights="none")

    fit_end = events.index(("fit_end",))
    test_names = {f"{r[0]}.png" for r in rows if r[2] == "TEST"}
    train_val_names = {f"{r[0]}.png" for r in rows if r[2] != "TEST"}
    loads_before = {name for kind, name in
                    (e for e in events[:fit_end] if e[0] == "load")}
    loads_after = {name for kind, name in
                   (e for e in events[fit_end:] if e[0] == "load")}
    assert loads_before == train_val_names
    assert loads_after == test_names
    assert events.index(("fit_start",)) < fit_end


def test_pipeline_score_rows_follow_manifest_order(tmp_path, monkeypatch):
    rows = [
        ("zz_test", "MEL", "TEST"),
        ("aa_train", "NV", "TRAIN"),
        ("mm_test", "BCC", "TEST"),
        ("bb_val", "NV", "VAL"),
        ("aa_test", "DF", "TEST"),
    ]
    manifest, images = build_dataset(tmp_path, rows, size=224)
    monkeypatch.setattr(runner, "build_model", lambda recipe, weights=None: tiny_model(224))
    recipe = get_recipe("densenet201", epochs=1, batch_size=2)
    runner.run(recipe, manifest, images, tmp_path / "scores.csv", seed=1, weights="none")
    lines = (tmp_path / "scores.csv").read_text(encoding="utf-8").splitlines()
    assert [line.split(",")[0] for line in lines[1:]] == ["zz_test", "mm_test", "aa_test"]
    assert [line.split(",")[1] for line in lines[1:]] == ["MEL", "BCC", "DF"]


def test_pipeline_missing_test_image_rejected(tmp_path, monkeypatch):
    rows = stratified_rows({"TRAIN": 1, "VAL": 1, "TEST": 1})
    manifest, images = build_dataset(tmp_path, rows, size=224)
    (images / "mel_test_000.png").unlink()
    monkeypatch.setattr(runner, "build_model", lambda recipe, weights=None: tiny_model(224))
    recipe = get_recipe("densenet201", epochs=1, batch_size=4)
    with pytest.raises(ValueError, match="TEST.*1 are missing"):
        runner.run(recipe, manifest, images, tmp_path / "scores.csv", seed=1, weights="none")


def test_pipeline_requires_every_split(tmp_path):
    rows = [("a", "MEL", "TEST"), ("b", "NV", "VAL")]
    manifest, images = build_dataset(tmp_path, rows, size=224)
    recipe = get_recipe("densenet201", epochs=1, batch_size=4)
    with pytest.raises(ValueError, match="no images to TRAIN"):
        runner.run(recipe, manifest, images, tmp_path / "s.csv", weights="none")
