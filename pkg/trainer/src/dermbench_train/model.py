"""Backbone construction with the classification heads of each recipe.

Fine-tuning updates the whole network, so every layer of the returned model
is trainable. Head layers carry fixed names (``head_*`` and ``scores``) so
runs and tests can locate them without positional guessing.
"""
from __future__ import annotations

from .labels import NUM_CLASSES
from .recipes import Architecture, HeadOp, TrainRecipe


class WeightLoadError(RuntimeError):
    """Raised when the requested pretrained weights cannot be loaded."""


def _base_constructor(architecture: Architecture):
    from keras import applications

    return {
        Architecture.INCEPTION_V3: applications.InceptionV3,
        Architecture.INCEPTION_RESNET_V2: applications.InceptionResNetV2,
        Architecture.RESNET_152: applications.ResNet152,
        Architecture.DENSENET_201: applications.DenseNet201,
    }[architecture]


def build_model(recipe: TrainRecipe, weights: str | None = "imagenet"):
    """Assemble backbone plus head as one trainable keras model.

    ``weights`` is ``"imagenet"``, a path to a weights file, or ``"none"`` /
    ``None`` for random initialization. Any failure to materialize the
    requested weights raises WeightLoadError.
    """
    import keras
    from keras import layers

    if weights in (None, "none", ""):
        weights = None
    constructor = _base_constructor(recipe.architecture)
    size = recipe.input_size
    try:
        base = constructor(include_top=False, weights=weights, input_shape=(size, size, 3))
    except Exception as exc:
        raise WeightLoadError(
            f"could not build {recipe.architecture.value} with weights={weights!r}: {exc}"
        ) from exc

    x = base.output
    fc_index = 0
    for op in recipe.head:
        if op is HeadOp.AVG_POOL:
            # pool over the full feature map; flatten follows in the head
            pool = (int(x.shape[1]), int(x.shape[2]))
            x = layers.AveragePooling2D(pool_size=pool, name="head_avg_pool")(x)
        elif op is HeadOp.GLOBAL_AVG_POOL:
            x = layers.GlobalAveragePooling2D(name="head_global_avg_pool")(x)
        elif op is HeadOp.FLATTEN:
            x = layers.Flatten(name="head_flatten")(x)
        elif op is HeadOp.FC:
            fc_index += 1
            x = layers.Dense(recipe.fc_width, activation="relu", name=f"head_fc_{fc_index}")(x)
        elif op is HeadOp.SOFTMAX:
            x = layers.Dense(NUM_CLASSES, activation="softmax", name="scores")(x)

    model = keras.Model(base.input, x, name=recipe.architecture.value)
    for layer in model.layers:
        layer.trainable = True
    return model
