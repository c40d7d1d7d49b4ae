"""Training recipes for the four supported backbones.

Each recipe binds a backbone to its required input size, base learning rate,
classification head layout, and the pixel normalization convention of the
published pretrained weights. Input size and learning rate are locked to the
architecture; epochs, batch size, fully connected width, and decay may be
overridden per run.
"""
from __future__ import annotations

import dataclasses
import enum
from dataclasses import dataclass


class Architecture(enum.Enum):
    """Backbones the runner knows how to build."""

    INCEPTION_V3 = "inception_v3"
    INCEPTION_RESNET_V2 = "inception_resnet_v2"
    RESNET_152 = "resnet152"
    DENSENET_201 = "densenet201"


class HeadOp(enum.Enum):
    """Layer kinds a classification head is assembled from, in order."""

    AVG_POOL = "avg_pool"
    GLOBAL_AVG_POOL = "global_avg_pool"
    FLATTEN = "flatten"
    FC = "fc"
    SOFTMAX = "softmax"


# input size and base learning rate are bound to the architecture
_REQUIRED_INPUT_SIZE = {
    Architecture.INCEPTION_V3: 299,
    Architecture.INCEPTION_RESNET_V2: 224,
    Architecture.RESNET_152: 224,
    Architecture.DENSENET_201: 224,
}
_REQUIRED_LEARNING_RATE = {
    Architecture.INCEPTION_V3: 0.0007,
    Architecture.INCEPTION_RESNET_V2: 0.0006,
    Architecture.RESNET_152: 0.0006,
    Architecture.DENSENET_201: 0.0006,
}

_HEADS = {
    Architecture.INCEPTION_V3: (
        HeadOp.AVG_POOL, HeadOp.FLATTEN, HeadOp.FC, HeadOp.FC, HeadOp.SOFTMAX,
    ),
    Architecture.INCEPTION_RESNET_V2: (
        HeadOp.GLOBAL_AVG_POOL, HeadOp.FC, HeadOp.SOFTMAX,
    ),
    Architecture.RESNET_152: (
        HeadOp.AVG_POOL, HeadOp.FLATTEN, HeadOp.FC, HeadOp.SOFTMAX,
    ),
    Architecture.DENSENET_201: (
        HeadOp.GLOBAL_AVG_POOL, HeadOp.SOFTMAX,
    ),
}

# pixel normalization mode of each backbone's pretrained weights
_NORMALIZATION = {
    Architecture.INCEPTION_V3: "tf",
    Architecture.INCEPTION_RESNET_V2: "tf",
    Architecture.RESNET_152: "caffe",
    Architecture.DENSENET_201: "torch",
}

NORMALIZATION_MODES = ("tf", "caffe", "torch", "unit")


@dataclass(frozen=True)
class TrainRecipe:
    """One complete fine-tuning configuration.

    ``head`` lists the layers appended after the convolutional backbone,
    ending in the eight-way softmax.
    """

    architecture: Architecture
    input_size: int
    head: tuple[HeadOp, ...]
    learning_rate: float
    normalization: str
    momentum: float = 0.9
    decay: float = 1e-6
    fc_width: int = 1024
    epochs: int = 30
    batch_size: int = 32

    def __post_init__(self) -> None:
        required_size = _REQUIRED_INPUT_SIZE[self.architecture]
        required_lr = _REQUIRED_LEARNING_RATE[self.architecture]
        if self.input_size != required_size:
            raise ValueError(
                f"{self.architecture.value} requires input size {required_size}, "
                f"got {self.input_size}"
            )
        if self.learning_rate != required_lr:
            raise ValueError(
                f"{self.architecture.value} requires learning rate {required_lr}, "
                f"got {self.learning_rate}"
            )
        if not self.head or self.head[-1] is not HeadOp.SOFTMAX:
            raise ValueError("head must end with the softmax layer")
        if sum(op is HeadOp.SOFTMAX for op in self.head) != 1:
            raise ValueError("head must contain exactly one softmax layer")
        if self.head[0] not in (HeadOp.AVG_POOL, HeadOp.GLOBAL_AVG_POOL):
            raise ValueError("head must start with a pooling layer")
        if not 0.0 <= self.momentum < 1.0:
            raise ValueError(f"momentum must be in [0, 1), got {self.momentum}")
        if self.decay < 0.0:
            raise ValueError(f"decay must be non-negative, got {self.decay}")
        if self.normalization not in NORMALIZATION_MODES:
            raise ValueError(f"unknown normalization mode: {self.normalization!r}")
        for name in ("fc_width", "epochs", "batch_size"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")


def _preset(architecture: Architecture) -> TrainRecipe:
    return TrainRecipe(
        architecture=architecture,
        input_size=_REQUIRED_INPUT_SIZE[architecture],
        head=_HEADS[architecture],
        learning_rate=_REQUIRED_LEARNING_RATE[architecture],
        normalization=_NORMALIZATION[architecture],
    )


RECIPES = {architecture.value: _preset(architecture) for architecture in Architecture}


def get_recipe(
    name: str,
    *,
    epochs: int | None = None,
    batch_size: int | None = None,
    fc_width: int | None = None,
    decay: float | None = None,
) -> TrainRecipe:
    """Look up a preset by architecture name, optionally overriding the
    tunable fields. Raises ValueError for unknown names."""
    try:
        recipe = RECIPES[name]
    except KeyError:
        raise ValueError(
            f"unknown recipe {name!r}; expected one of {', '.join(sorted(RECIPES))}"
        ) from None
    overrides = {
        key: value
        for key, value in (
            ("epochs", epochs),
            ("batch_size", batch_size),
            ("fc_width", fc_width),
            ("decay", decay),
        )
        if value is not None
    }
    if overrides:
        recipe = dataclasses.replace(recipe, **overrides)
    return recipe
