"""Canonical 8-class label taxonomy shared by every file format and report.

The class order is fixed; changing it would silently break score files,
confusion matrices and rendered tables, so it lives in exactly one place.
"""
from __future__ import annotations

from enum import Enum, IntEnum


class ClassId(IntEnum):
    """The eight diagnostic categories, in canonical column order."""

    MEL = 0
    NV = 1
    BCC = 2
    AKIEC = 3
    BKL = 4
    DF = 5
    VASC = 6
    ATYP_NV = 7

    @property
    def code(self) -> str:
        return self.name


NUM_CLASSES = 8
ALL_CLASSES: tuple[ClassId, ...] = tuple(ClassId)
CLASS_CODES: tuple[str, ...] = tuple(c.name for c in ClassId)

# Human-facing column headings used in rendered tables (these intentionally
# differ from the symbolic codes: "BK" and "Atyp NV").
DISPLAY_NAMES: dict[ClassId, str] = {
    ClassId.MEL: "Mel",
    ClassId.NV: "NV",
    ClassId.BCC: "BCC",
    ClassId.AKIEC: "AKIEC",
    ClassId.BKL: "BK",
    ClassId.DF: "DF",
    ClassId.VASC: "VASC",
    ClassId.ATYP_NV: "Atyp NV",
}

# HAM10000 `dx` column -> canonical class.
HAM10000_CODE_TABLE: dict[str, ClassId] = {
    "nv": ClassId.NV,
    "mel": ClassId.MEL,
    "bcc": ClassId.BCC,
    "akiec": ClassId.AKIEC,
    "bkl": ClassId.BKL,
    "df": ClassId.DF,
    "vasc": ClassId.VASC,
}

# PH2 clinical diagnosis -> canonical class. Keys are normalized to lowercase
# with single spaces; numeric codes follow the PH2 index convention
# (0 = common nevus, 1 = atypical nevus, 2 = melanoma).
PH2_DIAGNOSIS_TABLE: dict[str, ClassId] = {
    "common nevus": ClassId.NV,
    "atypical nevus": ClassId.ATYP_NV,
    "melanoma": ClassId.MEL,
    "0": ClassId.NV,
    "1": ClassId.ATYP_NV,
    "2": ClassId.MEL,
}

# Images the PH2 ingest keeps unless told otherwise: the two categories that
# extend the 7 HAM10000 classes to 8.
PH2_DEFAULT_SELECTION: frozenset[ClassId] = frozenset({ClassId.MEL, ClassId.ATYP_NV})


class Source(str, Enum):
    """Origin dataset of a manifest record."""

    HAM10000 = "HAM10000"
    PH2 = "PH2"


class Split(str, Enum):
    """Holdout partition assignment."""

    TRAIN = "TRAIN"
    VAL = "VAL"
    TEST = "TEST"


def parse_class(code: str) -> ClassId:
    """Map a symbolic class code (e.g. ``"MEL"``) to its ClassId."""
    try:
        return ClassId[code]
    except KeyError:
        raise ValueError(f"unknown class code {code!r}; expected one of {', '.join(CLASS_CODES)}") from None
