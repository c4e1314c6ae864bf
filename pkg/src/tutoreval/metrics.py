"""Strict three-class and lenient two-class macro-F1 and accuracy.

Macro-F1 is the unweighted mean of per-class F1 over the full class set,
including classes with zero support; any 0/0 ratio (precision, recall, or
F1 with an empty denominator) is defined as 0, never NaN. All arithmetic is
exact rational; callers convert to floats or percentages at the edge.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Sequence

from .errors import DuplicateIdError, EmptyInputError, JoinError, SchemaError, ValidationError
from .jsonl import read_jsonl
from .labels import (
    LENIENT_CLASSES,
    STRICT_CLASSES,
    Label,
    collapse_label,
    parse_label,
)

MODES = ("strict", "lenient")


@dataclass(frozen=True)
class LabeledPair:
    """A gold/predicted label pair for one instance."""

    instance_id: str
    gold: Hashable
    predicted: Hashable

    def __post_init__(self) -> None:
        if not self.instance_id:
            raise SchemaError("instance_id must be non-empty")


@dataclass(frozen=True)
class ClassScores:
    precision: Fraction
    recall: Fraction
    f1: Fraction
    support: int


@dataclass(frozen=True)
class ScoreReport:
    macro_f1: Fraction
    accuracy: Fraction
    per_class: dict[Hashable, ClassScores]


class ConfusionMatrix:
    """Gold-by-predicted counts over an ordered class set."""

    def __init__(self, classes: Sequence[Hashable], counts: Sequence[Sequence[int]]):
        self.classes = tuple(classes)
        self.counts = [list(row) for row in counts]
        size = len(self.classes)
        if len(self.counts) != size or any(len(row) != size for row in self.counts):
            raise ValidationError(f"counts grid must be {size}x{size}")
        if any(cell < 0 for row in self.counts for cell in row):
            raise ValidationError("counts must be non-negative")
        self._index = {cls: i for i, cls in enumerate(self.classes)}

    @property
    def n(self) -> int:
        return sum(sum(row) for row in self.counts)

    def count(self, gold: Hashable, predicted: Hashable) -> int:
        return self.counts[self._index[gold]][self._index[predicted]]

    def support(self, cls: Hashable) -> int:
        return sum(self.counts[self._index[cls]])

    def predicted_total(self, cls: Hashable) -> int:
        j = self._index[cls]
        return sum(row[j] for row in self.counts)

    def precision(self, cls: Hashable) -> Fraction:
        tp = self.count(cls, cls)
        total = self.predicted_total(cls)
        return Fraction(tp, total) if total else Fraction(0)

    def recall(self, cls: Hashable) -> Fraction:
        tp = self.count(cls, cls)
        total = self.support(cls)
        return Fraction(tp, total) if total else Fraction(0)

    def f1(self, cls: Hashable) -> Fraction:
        precision = self.precision(cls)
        recall = self.recall(cls)
        if precision + recall == 0:
            return Fraction(0)
        return 2 * precision * recall / (precision + recall)


def build_confusion(
    pairs: Sequence[LabeledPair], class_set: Sequence[Hashable]
) -> ConfusionMatrix:
    """Count gold/predicted pairs into a confusion grid over class_set."""
    if not pairs:
        raise EmptyInputError("cannot build a confusion matrix from zero pairs")
    classes = tuple(class_set)
    index = {cls: i for i, cls in enumerate(classes)}
    counts = [[0] * len(classes) for _ in classes]
    for pair in pairs:
        for which, label in (("gold", pair.gold), ("predicted", pair.predicted)):
            if label not in index:
                raise ValidationError(
                    f"instance {pair.instance_id!r}: {which} label {label!r} outside the class set"
                )
        counts[index[pair.gold]][index[pair.predicted]] += 1
    return ConfusionMatrix(classes, counts)


def macro_f1(matrix: ConfusionMatrix) -> Fraction:
    """Unweighted mean of per-class F1 over every class in the matrix."""
    return sum(
        (matrix.f1(cls) for cls in matrix.classes), Fraction(0)
    ) / len(matrix.classes)


def accuracy(matrix: ConfusionMatrix) -> Fraction:
    """Diagonal mass over total count."""
    total = matrix.n
    if total == 0:
        raise EmptyInputError("accuracy needs at least one pair")
    diagonal = sum(matrix.count(cls, cls) for cls in matrix.classes)
    return Fraction(diagonal, total)


def to_lenient(pairs: Sequence[LabeledPair]) -> list[LabeledPair]:
    """Collapse both sides of each pair onto the two-way scheme, preserving order."""
    return [
        LabeledPair(
            instance_id=pair.instance_id,
            gold=collapse_label(pair.gold),
            predicted=collapse_label(pair.predicted),
        )
        for pair in pairs
    ]


def score(pairs: Sequence[LabeledPair], mode: str = "strict") -> ScoreReport:
    """Score a pair set under the strict or lenient protocol."""
    if mode not in MODES:
        raise ValidationError(f"unknown mode {mode!r}; expected 'strict' or 'lenient'")
    if not pairs:
        raise EmptyInputError("cannot score zero pairs")
    seen: set[str] = set()
    for pair in pairs:
        if pair.instance_id in seen:
            raise DuplicateIdError(f"duplicate instance id {pair.instance_id!r}")
        seen.add(pair.instance_id)

    if mode == "lenient":
        pairs = to_lenient(pairs)
        classes: tuple = LENIENT_CLASSES
    else:
        classes = STRICT_CLASSES
    matrix = build_confusion(pairs, classes)
    per_class = {
        cls: ClassScores(
            precision=matrix.precision(cls),
            recall=matrix.recall(cls),
            f1=matrix.f1(cls),
            support=matrix.support(cls),
        )
        for cls in classes
    }
    return ScoreReport(macro_f1=macro_f1(matrix), accuracy=accuracy(matrix), per_class=per_class)


def read_label_file(document: str) -> dict[str, Label]:
    """Parse an {"id", "label"} JSONL document into an ordered id-to-label map."""
    labels: dict[str, Label] = {}
    for index, row in enumerate(read_jsonl(document)):
        where = f"record #{index}"
        if "id" not in row:
            raise SchemaError(f"{where}: missing required field 'id'")
        if "label" not in row:
            raise SchemaError(f"{where}: missing required field 'label'")
        record_id = row["id"]
        if not isinstance(record_id, str) or not record_id:
            raise SchemaError(f"{where}: field 'id' must be a non-empty string")
        if record_id in labels:
            raise DuplicateIdError(f"duplicate id {record_id!r}")
        if not isinstance(row["label"], str):
            raise SchemaError(f"{where}: field 'label' must be a string")
        labels[record_id] = parse_label(row["label"])
    return labels


def join_labels(gold: dict[str, Label], predicted: dict[str, Label]) -> list[LabeledPair]:
    """Pair gold and predicted labels by id; both sides must cover the same ids.

    Pairs come back in the gold map's order.
    """
    missing_pred = [key for key in gold if key not in predicted]
    missing_gold = [key for key in predicted if key not in gold]
    if missing_pred or missing_gold:
        parts = []
        if missing_pred:
            parts.append(f"ids missing from predictions: {sorted(missing_pred)}")
        if missing_gold:
            parts.append(f"ids missing from gold: {sorted(missing_gold)}")
        raise JoinError("; ".join(parts))
    return [
        LabeledPair(instance_id=key, gold=gold[key], predicted=predicted[key]) for key in gold
    ]
