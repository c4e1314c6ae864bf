"""Seeded synthetic ensembles for property testing and calibration studies.

Randomness comes from an explicitly specified 64-bit generator (xorshift*
with a splitmix64-mixed seed) rather than a platform RNG, so a profile's
output is bit-identical everywhere. Draw order is fixed: for each instance,
the gold label first, then one vote per model in model order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .ensemble import PredictionMatrix
from .errors import SchemaError, ValidationError
from .labels import STRICT_CLASSES, Label, LabelDistribution

_MASK64 = (1 << 64) - 1


def _splitmix64(value: int) -> int:
    value = (value + 0x9E3779B97F4A7C15) & _MASK64
    value = ((value ^ (value >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    value = ((value ^ (value >> 27)) * 0x94D049BB133111EB) & _MASK64
    return value ^ (value >> 31)


class XorShift64Star:
    """xorshift64* stream; the seed is pre-mixed so any integer works."""

    def __init__(self, seed: int):
        state = _splitmix64(seed & _MASK64)
        self._state = state if state else 0x9E3779B97F4A7C15

    def next_uint64(self) -> int:
        x = self._state
        x ^= x >> 12
        x = (x ^ (x << 25)) & _MASK64
        x ^= x >> 27
        self._state = x
        return (x * 0x2545F4914F6CDD1D) & _MASK64

    def random(self) -> float:
        """Uniform in [0, 1) with 53 bits of precision."""
        return (self.next_uint64() >> 11) * 2.0**-53


@dataclass(frozen=True)
class SimProfile:
    """Generator settings: sizes, gold distribution, per-gold vote behavior.

    ``confusion`` maps each gold label to the distribution a single model
    draws its vote from; every row must itself be a valid distribution.
    """

    n_instances: int
    n_models: int
    gold_distribution: LabelDistribution
    confusion: Mapping[Label, LabelDistribution]
    seed: int

    def __post_init__(self) -> None:
        if self.n_instances < 1:
            raise ValidationError("n_instances must be at least 1")
        if self.n_models < 1:
            raise ValidationError("n_models must be at least 1")
        for label in STRICT_CLASSES:
            if self.gold_distribution.get(label) > 0 and label not in self.confusion:
                raise ValidationError(
                    f"confusion profile is missing a row for gold label {label.text!r}"
                )


def _draw(rng: XorShift64Star, distribution: LabelDistribution) -> Label:
    u = rng.random()
    acc = Fraction(0)
    fallback = None
    for label in STRICT_CLASSES:
        freq = distribution.get(label)
        if freq > 0:
            fallback = label
        acc += freq
        if u < acc:
            return label
    # float sum can land a hair under 1; the last supported label absorbs it
    assert fallback is not None
    return fallback


def simulate(profile: SimProfile) -> tuple[list[Label], PredictionMatrix]:
    """Draw gold labels and per-model votes; output is a pure function of the profile."""
    rng = XorShift64Star(profile.seed)
    width = max(6, len(str(profile.n_instances - 1)))
    gold: list[Label] = []
    rows: list[tuple[str, list[Label]]] = []
    for index in range(profile.n_instances):
        gold_label = _draw(rng, profile.gold_distribution)
        gold.append(gold_label)
        vote_distribution = profile.confusion[gold_label]
        votes = [_draw(rng, vote_distribution) for _ in range(profile.n_models)]
        rows.append((f"sim-{index:0{width}d}", votes))
    return gold, PredictionMatrix.from_rows(rows)


def parse_profile(
    document: str,
    n_instances: int | None = None,
    n_models: int | None = None,
    seed: int | None = None,
) -> SimProfile:
    """Load a profile from JSON; explicit arguments override file values.

    Expected shape: {"gold_distribution": {label: freq, ...},
    "confusion": {gold label: {label: freq, ...}, ...},
    optionally "n_instances", "n_models", "seed"}.
    """
    import json

    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid profile JSON: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise SchemaError("profile must be a JSON object")

    def distribution(raw, where: str) -> LabelDistribution:
        if not isinstance(raw, dict):
            raise SchemaError(f"{where} must be an object of label frequencies")
        freq = {}
        for key, value in raw.items():
            label = next((lab for lab in Label if lab.value == key), None)
            if label is None:
                raise SchemaError(f"{where}: unknown label {key!r}")
            freq[label] = Fraction(value)
        return LabelDistribution(freq)

    if "gold_distribution" not in data:
        raise SchemaError("profile is missing 'gold_distribution'")
    if "confusion" not in data:
        raise SchemaError("profile is missing 'confusion'")
    gold_distribution = distribution(data["gold_distribution"], "gold_distribution")
    raw_confusion = data["confusion"]
    if not isinstance(raw_confusion, dict):
        raise SchemaError("'confusion' must be an object keyed by gold label")
    confusion = {}
    for key, row in raw_confusion.items():
        label = next((lab for lab in Label if lab.value == key), None)
        if label is None:
            raise SchemaError(f"confusion: unknown gold label {key!r}")
        confusion[label] = distribution(row, f"confusion[{key!r}]")

    def resolved(name: str, override):
        if override is not None:
            return override
        if name in data:
            value = data[name]
            if not isinstance(value, int):
                raise SchemaError(f"profile field {name!r} must be an integer")
            return value
        raise SchemaError(f"profile field {name!r} missing and no override given")

    return SimProfile(
        n_instances=resolved("n_instances", n_instances),
        n_models=resolved("n_models", n_models),
        gold_distribution=gold_distribution,
        confusion=confusion,
        seed=resolved("seed", seed),
    )
