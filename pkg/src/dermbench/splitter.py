"""Deterministic stratified train/val/test partitioning.

Within each class, records are canonicalized by image_id sort, shuffled by a
splitmix64 stream seeded from (seed, class index), and allocated to splits by
largest-remainder apportionment. The assignment is therefore a pure function
of manifest content and the SplitSpec, independent of input row order.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction

from .dataset import ManifestRecord, with_split
from .errors import ValidationError
from .rng import SplitMix64, derive_seed
from .taxonomy import ALL_CLASSES, ClassId, Split

SPLIT_ORDER: tuple[Split, ...] = (Split.TRAIN, Split.VAL, Split.TEST)

DEFAULT_FRACTIONS: tuple[Fraction, Fraction, Fraction] = (
    Fraction(70, 100),
    Fraction(15, 100),
    Fraction(15, 100),
)


@dataclass(frozen=True)
class SplitSpec:
    """Fractions (train, val, test), a 64-bit seed, and the grouping mode."""

    fractions: tuple[Fraction, Fraction, Fraction] = DEFAULT_FRACTIONS
    seed: int = 0
    group_by_lesion: bool = False

    def __post_init__(self) -> None:
        fracs = tuple(Fraction(f) for f in self.fractions)
        if len(fracs) != 3 or any(f < 0 for f in fracs):
            raise ValidationError(f"fractions must be three non-negative rationals, got {self.fractions}")
        if sum(fracs) != 1:
            raise ValidationError(f"fractions must sum to exactly 1, got {self.fractions}")
        if not 0 <= self.seed < 2**64:
            raise ValidationError(f"seed must fit in 64 unsigned bits, got {self.seed}")
        object.__setattr__(self, "fractions", fracs)


def parse_fractions(text: str) -> tuple[Fraction, Fraction, Fraction]:
    """Parse ``"0.7,0.15,0.15"`` into exact rationals."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise ValidationError(f"expected three comma-separated fractions, got {text!r}")
    try:
        fracs = tuple(Fraction(p) for p in parts)
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"unparseable fractions {text!r}") from None
    return fracs  # type: ignore[return-value]


def largest_remainder(total: int, fractions: tuple[Fraction, Fraction, Fraction]) -> tuple[int, int, int]:
    """Apportion `total` seats across the three splits.

    Floors of the exact targets first; leftover seats go to the largest
    fractional remainders, ties broken by split priority TRAIN > VAL > TEST.
    """
    targets = [f * total for f in fractions]
    floors = [int(t) for t in targets]  # Fraction -> floor for non-negatives
    remainders = [t - fl for t, fl in zip(targets, floors)]
    seats = total - sum(floors)
    order = sorted(range(3), key=lambda i: (-remainders[i], i))
    counts = list(floors)
    for i in order[:seats]:
        counts[i] += 1
    return counts[0], counts[1], counts[2]


def _split_units(units: list[list[ManifestRecord]], class_id: ClassId, spec: SplitSpec) -> dict[str, Split]:
    """Shuffle unit order and map each unit's record ids to a split."""
    rng = SplitMix64(derive_seed(spec.seed, int(class_id)))
    rng.shuffle(units)
    n_train, n_val, _ = largest_remainder(len(units), spec.fractions)
    assignment: dict[str, Split] = {}
    for pos, unit in enumerate(units):
        if pos < n_train:
            split = Split.TRAIN
        elif pos < n_train + n_val:
            split = Split.VAL
        else:
            split = Split.TEST
        for rec in unit:
            assignment[rec.image_id] = split
    return assignment


def stratified_split(manifest: list[ManifestRecord], spec: SplitSpec) -> list[ManifestRecord]:
    """Assign every record to TRAIN/VAL/TEST, preserving input order.

    With ``group_by_lesion`` the shuffled/apportioned units are whole lesion
    groups (records lacking a lesion_id form singleton groups); otherwise
    units are individual records.
    """
    if not manifest:
        return []
    ids = [rec.image_id for rec in manifest]
    if len(set(ids)) != len(ids):
        raise ValidationError("manifest has duplicate image_ids; cannot split")

    canonical = sorted(manifest, key=lambda rec: rec.image_id)
    n_nonzero = sum(1 for f in spec.fractions if f > 0)

    # Build per-class shuffle units in canonical order.
    per_class_units: dict[ClassId, list[list[ManifestRecord]]] = {c: [] for c in ALL_CLASSES}
    if spec.group_by_lesion:
        group_index: dict[str, list[ManifestRecord]] = {}
        group_order: list[tuple[ClassId, str]] = []
        for rec in canonical:
            key = rec.lesion_id or rec.image_id
            if key not in group_index:
                group_index[key] = []
                # A group is stratified under the class of its first record
                # in canonical order (lesions are single-diagnosis in practice).
                group_order.append((rec.label, key))
            group_index[key].append(rec)
        for class_id, key in group_order:
            per_class_units[class_id].append(group_index[key])
    else:
        for rec in canonical:
            per_class_units[rec.label].append([rec])

    assignment: dict[str, Split] = {}
    for class_id in ALL_CLASSES:
        units = per_class_units[class_id]
        if not units:
            continue
        if len(units) < n_nonzero:
            warnings.warn(
                f"class {class_id.code}: only {len(units)} unit(s) for {n_nonzero} "
                f"non-zero split fractions; some splits get zero records",
                stacklevel=2,
            )
        assignment.update(_split_units(units, class_id, spec))

    return [with_split(rec, assignment[rec.image_id]) for rec in manifest]


@dataclass(frozen=True)
class SplitReport:
    """Per-split tallies plus the lesion-leakage verdict."""

    counts: dict[Split, dict[ClassId, int]]
    totals: dict[Split, int]
    fractions: dict[Split, float]
    leakage: bool | None = None  # None when no lesion_ids are present
    leaking_lesions: tuple[str, ...] = field(default_factory=tuple)


def verify_split(manifest: list[ManifestRecord]) -> SplitReport:
    """Tally an assigned manifest and flag lesion leakage across splits."""
    unassigned = [rec.image_id for rec in manifest if rec.split is None]
    if unassigned:
        raise ValidationError(
            f"{len(unassigned)} record(s) have no split assignment, e.g. {unassigned[:5]}"
        )
    counts = {s: {c: 0 for c in ALL_CLASSES} for s in SPLIT_ORDER}
    totals = {s: 0 for s in SPLIT_ORDER}
    lesion_splits: dict[str, set[Split]] = {}
    for rec in manifest:
        assert rec.split is not None
        counts[rec.split][rec.label] += 1
        totals[rec.split] += 1
        if rec.lesion_id:
            lesion_splits.setdefault(rec.lesion_id, set()).add(rec.split)
    n = len(manifest)
    fractions = {s: (totals[s] / n if n else 0.0) for s in SPLIT_ORDER}
    if lesion_splits:
        leaking = tuple(sorted(k for k, v in lesion_splits.items() if len(v) > 1))
        leakage: bool | None = bool(leaking)
    else:
        leaking = ()
        leakage = None
    return SplitReport(counts=counts, totals=totals, fractions=fractions,
                       leakage=leakage, leaking_lesions=leaking)
