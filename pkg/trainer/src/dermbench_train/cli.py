"""Command line entry point: fine-tune one backbone, score the TEST split.

Exit codes: 0 on success, 1 for validation or training failures, 2 for
I/O errors.
"""
from __future__ import annotations

import argparse
import os
import sys

os.environ.setdefault("TF_CPP_MIN_LOG_LEVEL", "2")

from .model import WeightLoadError
from .recipes import RECIPES, get_recipe
from .runner import run


class _Parser(argparse.ArgumentParser):
    # keep usage errors on the same exit code as other validation failures
    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="dermbench-train",
        description="Fine-tune a pretrained backbone on a split manifest and "
        "write an evaluator-ready score file for the TEST split.",
    )
    parser.add_argument("--recipe", required=True, choices=sorted(RECIPES),
                        help="architecture preset to train")
    parser.add_argument("--manifest", required=True,
                        help="split manifest CSV (image_id, label, split)")
    parser.add_argument("--images", required=True,
                        help="directory of preprocessed <image_id>.png rasters")
    parser.add_argument("-o", "--output", required=True,
                        help="score file to write for the TEST split")
    parser.add_argument("--epochs", type=int, default=None,
                        help="override the recipe default (30)")
    parser.add_argument("--batch", type=int, default=None,
                        help="override the recipe default (32)")
    parser.add_argument("--fc-width", type=int, default=None,
                        help="override the fully connected width (1024)")
    parser.add_argument("--decay", type=float, default=None,
                        help="override the learning-rate decay (1e-6)")
    parser.add_argument("--seed", type=lambda s: int(s, 0), default=1,
                        help="run seed, recorded in the training log (default 1)")
    parser.add_argument("--weights", default="imagenet",
                        help="'imagenet', 'none', or a weights file path")
    parser.add_argument("--deterministic", action="store_true",
                        help="force deterministic kernels (slower)")
    parser.add_argument("--artifacts", default=None,
                        help="directory for checkpoint and log "
                        "(default: next to the score file)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        recipe = get_recipe(
            args.recipe,
            epochs=args.epochs,
            batch_size=args.batch,
            fc_width=args.fc_width,
            decay=args.decay,
        )
        result = run(
            recipe,
            args.manifest,
            args.images,
            args.output,
            seed=args.seed,
            weights=args.weights,
            deterministic=args.deterministic,
            artifacts_dir=args.artifacts,
            verbose=2,
        )
    except (ValueError, WeightLoadError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 2
    print(f"best epoch {result.best_epoch} (val loss {result.best_val_loss:.4f}); "
          f"scores written to {args.output}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
