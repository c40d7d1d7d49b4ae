"""SGD fine-tuning loop with checkpointing and a structured run log.

The optimizer is SGD with momentum and an inverse-time learning-rate decay,
``lr_t = lr / (1 + decay * t)`` with t counted in optimizer steps. The best
epoch by validation loss is kept as the checkpoint. A JSON log records the
seed, the hyperparameters, the normalization convention, and one row of
loss/accuracy per epoch.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class TrainResult:
    checkpoint_path: Path
    log_path: Path
    best_epoch: int  # 1-based epoch with the lowest validation loss
    best_val_loss: float
    history: list[dict]


def train(
    model,
    train_data: tuple[np.ndarray, np.ndarray],
    val_data: tuple[np.ndarray, np.ndarray],
    out_dir: str | Path,
    *,
    learning_rate: float,
    epochs: int,
    batch_size: int,
    momentum: float = 0.9,
    decay: float = 1e-6,
    seed: int = 1,
    deterministic: bool = False,
    normalization: str = "unit",
    checkpoint_name: str = "checkpoint.weights.h5",
    log_name: str = "training_log.json",
    extra_log: dict | None = None,
    verbose: int = 0,
) -> TrainResult:
    """Fit ``model`` and write the best checkpoint plus the run log.

    ``deterministic`` additionally forces deterministic kernels so a reseeded
    rerun reproduces the same losses; it trades away some speed.
    """
    import keras

    x_train, y_train = train_data
    x_val, y_val = val_data
    if len(x_train) == 0:
        raise ValueError("TRAIN split is empty; nothing to fit")
    if len(x_val) == 0:
        raise ValueError("VAL split is empty; checkpoint selection needs validation data")

    keras.utils.set_random_seed(seed)
    if deterministic:
        import tensorflow as tf

        tf.config.experimental.enable_op_determinism()

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    checkpoint_path = out_dir / checkpoint_name
    log_path = out_dir / log_name

    schedule = keras.optimizers.schedules.InverseTimeDecay(
        initial_learning_rate=learning_rate, decay_steps=1, decay_rate=decay
    )
    model.compile(
        optimizer=keras.optimizers.SGD(learning_rate=schedule, momentum=momentum),
        loss="sparse_categorical_crossentropy",
        metrics=["accuracy"],
    )
    checkpoint = keras.callbacks.ModelCheckpoint(
        str(checkpoint_path),
        monitor="val_loss",
        save_best_only=True,
        save_weights_only=True,
    )
    fitted = model.fit(
        x_train,
        y_train,
        validation_data=(x_val, y_val),
        epochs=epochs,
        batch_size=batch_size,
        shuffle=True,
        callbacks=[checkpoint],
        verbose=verbose,
    )

    history = [
        {
            "epoch": epoch + 1,
            "loss": float(fitted.history["loss"][epoch]),
            "accuracy": float(fitted.history["accuracy"][epoch]),
            "val_loss": float(fitted.history["val_loss"][epoch]),
            "val_accuracy": float(fitted.history["val_accuracy"][epoch]),
        }
        for epoch in range(len(fitted.history["loss"]))
    ]
    if not checkpoint_path.is_file():
        raise RuntimeError("validation loss never improved; no checkpoint was written")
    val_losses = [row["val_loss"] for row in history]
    best_epoch = int(np.argmin(val_losses)) + 1

    log = {
        "seed": seed,
        "deterministic": deterministic,
        "normalization": normalization,
        "hyperparameters": {
            "learning_rate": learning_rate,
            "momentum": momentum,
            "decay": decay,
            "epochs": epochs,
            "batch_size": batch_size,
        },
        "best_epoch": best_epoch,
        "best_val_loss": val_losses[best_epoch - 1],
        "epochs_run": history,
    }
    if extra_log:
        log.update(extra_log)
    log_path.write_text(json.dumps(log, indent=2) + "\n", encoding="utf-8")

    return TrainResult(
        checkpoint_path=checkpoint_path,
        log_path=log_path,
        best_epoch=best_epoch,
        best_val_loss=val_losses[best_epoch - 1],
        history=history,
    )


def predict_scores(model, images: np.ndarray, batch_size: int) -> np.ndarray:
    """Softmax probabilities for a batch of images, one row per image."""
    if len(images) == 0:
        raise ValueError("no images to score")
    probabilities = model.predict(images, batch_size=batch_size, verbose=0)
    return np.asarray(probabilities, dtype=np.float64)
