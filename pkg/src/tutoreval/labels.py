"""Three-way label scheme, its two-way lenient collapse, and label distributions."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import EmptyInputError, LabelParseError, ValidationError


class Label(enum.Enum):
    """Annotation label for one tutor response on one track."""

    YES = "Yes"
    TO_SOME_EXTENT = "To some extent"
    NO = "No"

    @property
    def text(self) -> str:
        return self.value


class LenientLabel(enum.Enum):
    """Two-way label after merging Yes and To some extent."""

    POSITIVE = "Positive"
    NO = "No"

    @property
    def text(self) -> str:
        return self.value


#: Canonical class orders used for confusion matrices and rendering.
STRICT_CLASSES: tuple[Label, ...] = (Label.YES, Label.TO_SOME_EXTENT, Label.NO)
LENIENT_CLASSES: tuple[LenientLabel, ...] = (LenientLabel.POSITIVE, LenientLabel.NO)

_LENIENT_MAP = {
    Label.YES: LenientLabel.POSITIVE,
    Label.TO_SOME_EXTENT: LenientLabel.POSITIVE,
    Label.NO: LenientLabel.NO,
}


def parse_label(text: str) -> Label:
    """Parse a canonical label string, case-sensitively.

    Raises LabelParseError for anything but the exact spellings
    "Yes", "To some extent", "No".
    """
    for label in Label:
        if label.value == text:
            return label
    expected = ", ".join(repr(label.value) for label in Label)
    raise LabelParseError(f"invalid label {text!r}; expected one of {expected}")


def collapse_label(label: Label) -> LenientLabel:
    """Map a three-way label onto the lenient two-way scheme."""
    return _LENIENT_MAP[label]


_SUM_TOLERANCE = Fraction(1, 10**9)


@dataclass(frozen=True)
class LabelDistribution:
    """Empirical or target label frequencies; values are exact rationals.

    Frequencies must be non-negative and sum to 1 within 1e-9. Labels absent
    from the map have frequency 0.
    """

    freq: Mapping[Label, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        normalized: dict[Label, Fraction] = {}
        for label, value in self.freq.items():
            if not isinstance(label, Label):
                raise ValidationError(f"distribution key {label!r} is not a Label")
            frac = Fraction(value)
            if frac < 0:
                raise ValidationError(f"negative frequency {value!r} for {label.text!r}")
            normalized[label] = frac
        total = sum(normalized.values(), Fraction(0))
        if abs(total - 1) > _SUM_TOLERANCE:
            raise ValidationError(f"frequencies sum to {float(total)!r}, expected 1")
        object.__setattr__(self, "freq", normalized)

    @classmethod
    def from_labels(cls, labels: Iterable[Label]) -> "LabelDistribution":
        """Measure the empirical distribution of a label sequence."""
        counts: dict[Label, int] = {}
        n = 0
        for label in labels:
            counts[label] = counts.get(label, 0) + 1
            n += 1
        if n == 0:
            raise EmptyInputError("cannot measure a distribution from zero labels")
        return cls({label: Fraction(count, n) for label, count in counts.items()})

    @classmethod
    def from_tse_frequency(cls, tse_freq) -> "LabelDistribution":
        """Build a reference distribution from a To-some-extent frequency alone.

        Only freq[To some extent] drives ensemble calibration; the remaining
        mass is parked on Yes to satisfy the sum-to-1 invariant.
        """
        tse = Fraction(tse_freq)
        if not 0 <= tse <= 1:
            raise ValidationError(f"tse frequency {tse_freq!r} outside [0, 1]")
        return cls({Label.TO_SOME_EXTENT: tse, Label.YES: 1 - tse})

    def get(self, label: Label) -> Fraction:
        return self.freq.get(label, Fraction(0))
