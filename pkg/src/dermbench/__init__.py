"""dermbench: benchmarking harness for 8-class dermoscopy classification."""

from .taxonomy import ALL_CLASSES, CLASS_CODES, NUM_CLASSES, ClassId, Source, Split

__all__ = [
    "ALL_CLASSES",
    "CLASS_CODES",
    "NUM_CLASSES",
    "ClassId",
    "Source",
    "Split",
]

__version__ = "0.1.0"
