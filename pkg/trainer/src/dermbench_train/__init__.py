"""Fine-tuning runner producing evaluator-ready score files."""

from .labels import CLASS_CODES, NUM_CLASSES, SCORE_HEADER
from .model import WeightLoadError, build_model
from .recipes import RECIPES, Architecture, HeadOp, TrainRecipe, get_recipe
from .runner import run
from .scorefile import write_scores
from .train import TrainResult, predict_scores, train

__version__ = "0.1.0"

__all__ = [
    "Architecture",
    "CLASS_CODES",
    "HeadOp",
    "NUM_CLASSES",
    "RECIPES",
    "SCORE_HEADER",
    "TrainRecipe",
    "TrainResult",
    "WeightLoadError",
    "build_model",
    "get_recipe",
    "predict_scores",
    "run",
    "train",
    "write_scores",
    "__version__",
]
