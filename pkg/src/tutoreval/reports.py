"""Rendering of per-run score tables and label-distribution comparisons.

Percentages render with exactly two decimals everywhere. Run tables group
rows by track and mark every per-column best within a track (ties all
marked). The TSV form is unmarked and round-trips back to the same values.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import Track
from .errors import EmptyInputError, ParseError, ValidationError
from .labels import STRICT_CLASSES, LabelDistribution

RUN_TSV_HEADER = "track\trun\tstrict_f1\tlenient_f1\tstrict_acc\tlenient_acc"
_METRIC_FIELDS = ("strict_f1", "lenient_f1", "strict_acc", "lenient_acc")


@dataclass(frozen=True)
class RunResult:
    """One run's scores on one track, as percentages in [0, 100]."""

    track: Track
    run_name: str
    strict_f1: float
    lenient_f1: float
    strict_acc: float
    lenient_acc: float

    def __post_init__(self) -> None:
        for name in _METRIC_FIELDS:
            value = getattr(self, name)
            if not 0 <= value <= 100:
                raise ValidationError(f"{name}={value!r} outside [0, 100]")


def format_pct(value: float) -> str:
    """Two-decimal rendering of a percentage value (no sign symbol)."""
    return f"{float(value):.2f}"


def parse_run_results(document: str) -> list[RunResult]:
    """Parse the run-result TSV format back into RunResult rows."""
    lines = [line for line in document.split("\n") if line.strip()]
    if not lines:
        raise EmptyInputError("run-result document is empty")
    if lines[0] != RUN_TSV_HEADER:
        raise ParseError(f"bad header {lines[0]!r}; expected {RUN_TSV_HEADER!r}")
    results = []
    for lineno, line in enumerate(lines[1:], start=2):
        cells = line.split("\t")
        if len(cells) != 6:
            raise ParseError(f"line {lineno}: expected 6 tab-separated cells")
        track = Track.from_name(cells[0])
        try:
            values = [float(cell) for cell in cells[2:]]
        except ValueError as exc:
            raise ParseError(f"line {lineno}: non-numeric score cell") from exc
        results.append(RunResult(track, cells[1], *values))
    return results


def _grouped(results: list[RunResult]) -> list[tuple[Track, list[RunResult]]]:
    order: list[Track] = []
    groups: dict[Track, list[RunResult]] = {}
    for result in results:
        if result.track not in groups:
            order.append(result.track)
            groups[result.track] = []
        groups[result.track].append(result)
    return [(track, groups[track]) for track in order]


def _column_bests(group: list[RunResult]) -> dict[str, float]:
    return {name: max(getattr(r, name) for r in group) for name in _METRIC_FIELDS}


def render_run_table(results: list[RunResult], format: str = "markdown") -> str:
    """Render run results grouped by track with per-column bests marked."""
    if not results:
        raise EmptyInputError("cannot render an empty run table")
    if format == "tsv":
        lines = [RUN_TSV_HEADER]
        for result in results:
            cells = [result.track.value, result.run_name]
            cells += [format_pct(getattr(result, name)) for name in _METRIC_FIELDS]
            lines.append("\t".join(cells))
        return "\n".join(lines) + "\n"
    if format != "markdown":
        raise ValidationError(f"unknown format {format!r}; expected markdown or tsv")

    lines = [
        "| track | run | strict_f1 | lenient_f1 | strict_acc | lenient_acc |",
        "| --- | --- | --- | --- | --- | --- |",
    ]
    for track, group in _grouped(results):
        bests = _column_bests(group)
        for result in group:
            cells = [track.display_name, result.run_name]
            for name in _METRIC_FIELDS:
                value = getattr(result, name)
                cell = format_pct(value) + "%"
                if value == bests[name]:
                    cell = f"**{cell}**"
                cells.append(cell)
            lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def render_distribution_report(
    named_distributions: list[tuple[str, LabelDistribution]],
) -> str:
    """Aligned per-label percentage table, one column per source.

    The first source is the baseline; every later source also gets a signed
    delta column against it.
    """
    if not named_distributions:
        raise EmptyInputError("cannot render an empty distribution report")
    names = [name for name, _ in named_distributions]
    baseline = named_distributions[0][1]

    headers = ["label"] + names
    for name in names[1:]:
        headers.append(f"{name}-{names[0]}")
    rows = []
    for label in STRICT_CLASSES:
        row = [label.text]
        for _, distribution in named_distributions:
            row.append(format_pct(float(distribution.get(label)) * 100) + "%")
        for _, distribution in named_distributions[1:]:
            delta = (float(distribution.get(label)) - float(baseline.get(label))) * 100
            row.append(format_pct(delta))
        rows.append(row)

    widths = [
        max(len(headers[col]), *(len(row[col]) for row in rows))
        for col in range(len(headers))
    ]
    lines = []
    for row in [headers] + rows:
        cells = [row[0].ljust(widths[0])]
        cells += [cell.rjust(widths[col]) for col, cell in enumerate(row) if col > 0]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"
