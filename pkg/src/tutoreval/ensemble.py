"""Disagreement-aware aggregation of per-instance votes from M model runs.

Unanimous instances always keep their label. Split votes get a plurality
label first (ties broken toward the minority class), then a deterministic
quota pass flips the split instances with the strongest "To some extent"
evidence to that label until its share of the final output matches a
reference distribution. Flips only ever move labels toward "To some
extent"; nothing is flipped away from it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    DuplicateIdError,
    EmptyInputError,
    JoinError,
    SchemaError,
    ShapeError,
    ValidationError,
)
from .jsonl import read_jsonl
from .labels import STRICT_CLASSES, Label, LabelDistribution, parse_label

#: Plurality tie-break preference: minority class first, majority class last.
DEFAULT_TIE_ORDER: tuple[Label, ...] = (Label.TO_SOME_EXTENT, Label.NO, Label.YES)


class Basis(enum.Enum):
    """How an instance's final label was decided."""

    UNANIMOUS = "unanimous"
    PLURALITY = "plurality"
    QUOTA_FLIP = "quota_flip"


@dataclass(frozen=True)
class PredictionMatrix:
    """Votes from M runs for each instance, keyed by stable instance ids."""

    instance_ids: tuple[str, ...]
    votes: tuple[tuple[Label, ...], ...]

    def __post_init__(self) -> None:
        if len(self.instance_ids) != len(self.votes):
            raise ShapeError(
                f"{len(self.instance_ids)} ids but {len(self.votes)} vote rows"
            )
        seen: set[str] = set()
        for instance_id in self.instance_ids:
            if instance_id in seen:
                raise DuplicateIdError(f"duplicate instance id {instance_id!r}")
            seen.add(instance_id)
        if self.votes:
            m = len(self.votes[0])
            if m < 1:
                raise ShapeError("each instance needs at least one vote")
            for instance_id, row in zip(self.instance_ids, self.votes):
                if len(row) != m:
                    raise ShapeError(
                        f"instance {instance_id!r} has {len(row)} votes, expected {m}"
                    )

    @property
    def n_models(self) -> int:
        return len(self.votes[0]) if self.votes else 0

    @classmethod
    def from_rows(cls, rows: list[tuple[str, list[Label]]]) -> "PredictionMatrix":
        return cls(
            instance_ids=tuple(instance_id for instance_id, _ in rows),
            votes=tuple(tuple(vote_row) for _, vote_row in rows),
        )


@dataclass(frozen=True)
class EnsembleDecision:
    instance_id: str
    final: Label
    basis: Basis
    vote_counts: dict[Label, int]


def tally(matrix: PredictionMatrix) -> list[dict[Label, int]]:
    """Count votes per label for each instance; every count map sums to M."""
    m = matrix.n_models
    results = []
    for instance_id, row in zip(matrix.instance_ids, matrix.votes):
        if len(row) != m:
            raise ShapeError(f"instance {instance_id!r} has a ragged vote row")
        counts = {label: 0 for label in STRICT_CLASSES}
        for vote in row:
            counts[vote] += 1
        results.append(counts)
    return results


def plurality(
    vote_counts: dict[Label, int], tie_order: tuple[Label, ...] = DEFAULT_TIE_ORDER
) -> Label:
    """Label with the most votes; ties go to the earliest label in tie_order."""
    if sum(vote_counts.values()) < 1:
        raise EmptyInputError("plurality needs at least one vote")
    best = max(vote_counts.values())
    for label in tie_order:
        if vote_counts.get(label, 0) == best:
            return label
    # tie_order did not cover the winning label
    raise ValidationError(f"tie order {tie_order!r} does not cover all voted labels")


def _round_half_away_from_zero(value: Fraction) -> int:
    if value < 0:
        raise ValidationError(f"quota target {value!r} must be non-negative")
    return math.floor(value + Fraction(1, 2))


def aggregate(
    matrix: PredictionMatrix, reference: LabelDistribution
) -> list[EnsembleDecision]:
    """Aggregate votes, then flip split instances toward "To some extent"
    until its count reaches round(reference_freq * N) or candidates run out.

    Flip candidates are the non-unanimous instances not already labeled
    "To some extent" that received at least one such vote, taken by
    descending vote count for it, then ascending instance id.
    """
    if not matrix.instance_ids:
        raise EmptyInputError("cannot aggregate an empty prediction matrix")
    counts_per_instance = tally(matrix)
    m = matrix.n_models

    decisions: list[EnsembleDecision] = []
    for instance_id, counts in zip(matrix.instance_ids, counts_per_instance):
        unanimous_label = next(
            (label for label, count in counts.items() if count == m), None
        )
        if unanimous_label is not None:
            decisions.append(
                EnsembleDecision(instance_id, unanimous_label, Basis.UNANIMOUS, counts)
            )
        else:
            decisions.append(
                EnsembleDecision(instance_id, plurality(counts), Basis.PLURALITY, counts)
            )

    target = _round_half_away_from_zero(
        reference.get(Label.TO_SOME_EXTENT) * len(decisions)
    )
    current = sum(
        1 for decision in decisions if decision.final is Label.TO_SOME_EXTENT
    )
    candidates = sorted(
        (
            index
            for index, decision in enumerate(decisions)
            if decision.basis is not Basis.UNANIMOUS
            and decision.final is not Label.TO_SOME_EXTENT
            and decision.vote_counts[Label.TO_SOME_EXTENT] >= 1
        ),
        key=lambda index: (
            -decisions[index].vote_counts[Label.TO_SOME_EXTENT],
            decisions[index].instance_id,
        ),
    )
    flips = max(0, min(target - current, len(candidates)))
    for index in candidates[:flips]:
        old = decisions[index]
        decisions[index] = EnsembleDecision(
            old.instance_id, Label.TO_SOME_EXTENT, Basis.QUOTA_FLIP, old.vote_counts
        )
    return decisions


def output_distribution(decisions: list[EnsembleDecision]) -> LabelDistribution:
    """Empirical distribution of the final labels."""
    if not decisions:
        raise EmptyInputError("cannot measure a distribution from zero decisions")
    return LabelDistribution.from_labels(decision.final for decision in decisions)


def matrix_from_prediction_files(documents: list[str]) -> PredictionMatrix:
    """Build a matrix from M single-run {"id", "label"} JSONL documents.

    All documents must cover the same id set; instance order follows the
    first document.
    """
    if not documents:
        raise EmptyInputError("need at least one prediction document")
    runs = []
    for document in documents:
        run: dict[str, Label] = {}
        for index, row in enumerate(read_jsonl(document)):
            where = f"record #{index}"
            if "id" not in row or "label" not in row:
                raise SchemaError(f"{where}: prediction records need 'id' and 'label'")
            record_id = row["id"]
            if record_id in run:
                raise DuplicateIdError(f"duplicate id {record_id!r}")
            run[record_id] = parse_label(row["label"])
        runs.append(run)
    first = runs[0]
    for position, run in enumerate(runs[1:], start=2):
        missing = sorted(set(first) - set(run))
        extra = sorted(set(run) - set(first))
        if missing or extra:
            raise JoinError(
                f"prediction set #{position} id mismatch"
                f" (missing: {missing}, unexpected: {extra})"
            )
    return PredictionMatrix.from_rows(
        [(record_id, [run[record_id] for run in runs]) for record_id in first]
    )


def matrix_from_combined_file(document: str) -> PredictionMatrix:
    """Build a matrix from a combined {"id", "votes": [...]} JSONL document."""
    rows = []
    for index, row in enumerate(read_jsonl(document)):
        where = f"record #{index}"
        if "id" not in row or "votes" not in row:
            raise SchemaError(f"{where}: combined records need 'id' and 'votes'")
        votes = row["votes"]
        if not isinstance(votes, list) or not votes:
            raise SchemaError(f"{where}: 'votes' must be a non-empty array of labels")
        rows.append((row["id"], [parse_label(vote) for vote in votes]))
    return PredictionMatrix.from_rows(rows)
