"""End-to-end pipeline: load splits, fine-tune, restore the best epoch,
score the TEST split.

TEST images are read only after fitting finishes; training sees the TRAIN
and VAL splits alone.
"""
from __future__ import annotations

from pathlib import Path

from . import data
from .model import build_model
from .recipes import TrainRecipe
from .scorefile import write_scores
from .train import TrainResult, predict_scores, train


def run(
    recipe: TrainRecipe,
    manifest_path: str | Path,
    images_dir: str | Path,
    scores_path: str | Path,
    *,
    seed: int = 1,
    weights: str | None = "imagenet",
    deterministic: bool = False,
    artifacts_dir: str | Path | None = None,
    verbose: int = 0,
) -> TrainResult:
    """Train one recipe against a split manifest and write the score file.

    The checkpoint and the training log land in ``artifacts_dir`` (default:
    the score file's directory), named after the architecture.
    """
    scores_path = Path(scores_path)
    artifacts = Path(artifacts_dir) if artifacts_dir is not None else scores_path.parent

    records = data.read_manifest(manifest_path)
    if not data.split_records(records, "TRAIN"):
        raise ValueError("manifest assigns no images to TRAIN; nothing to fit")
    if not data.split_records(records, "VAL"):
        raise ValueError("manifest assigns no images to VAL; nothing to validate against")
    if not data.split_records(records, "TEST"):
        raise ValueError("manifest assigns no images to TEST; nothing to score")

    import keras

    # seed before construction so the head initialization is reproducible;
    # train() reseeds the same value for the shuffle stream
    keras.utils.set_random_seed(seed)
    model = build_model(recipe, weights=weights)

    size, mode = recipe.input_size, recipe.normalization
    x_train, y_train, _ = data.load_split(records, images_dir, "TRAIN", size, mode)
    x_val, y_val, _ = data.load_split(records, images_dir, "VAL", size, mode)
    arch = recipe.architecture.value
    result = train(
        model,
        (x_train, y_train),
        (x_val, y_val),
        artifacts,
        learning_rate=recipe.learning_rate,
        epochs=recipe.epochs,
        batch_size=recipe.batch_size,
        momentum=recipe.momentum,
        decay=recipe.decay,
        seed=seed,
        deterministic=deterministic,
        normalization=mode,
        checkpoint_name=f"{arch}.weights.h5",
        log_name=f"{arch}_training.json",
        extra_log={
            "architecture": arch,
            "input_size": size,
            "weights": "random" if weights in (None, "none", "") else str(weights),
        },
        verbose=verbose,
    )

    model.load_weights(result.checkpoint_path)
    x_test, y_test, test_ids = data.load_split(records, images_dir, "TEST", size, mode)
    probabilities = predict_scores(model, x_test, recipe.batch_size)
    write_scores(scores_path, test_ids, y_test, probabilities)
    return result
