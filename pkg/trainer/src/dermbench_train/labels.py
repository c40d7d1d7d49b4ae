"""Fixed eight-class label vocabulary shared with the benchmark file formats.

The order is load-bearing: it fixes both the softmax output indexing and the
probability column order of the score files the evaluator consumes.
"""
from __future__ import annotations

CLASS_CODES = ("MEL", "NV", "BCC", "AKIEC", "BKL", "DF", "VASC", "ATYP_NV")
NUM_CLASSES = len(CLASS_CODES)

CODE_TO_INDEX = {code: index for index, code in enumerate(CLASS_CODES)}

SCORE_HEADER = ("image_id", "true_label") + CLASS_CODES
