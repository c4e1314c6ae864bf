"""Command-line interface; every subcommand delegates to the library modules.

Exit codes: 0 success, 1 validation/domain/file errors, 2 usage errors.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import corpus, ensemble, harness, metrics, reports
from .errors import TutorEvalError, ValidationError
from .jsonl import dump_jsonl
from .labels import STRICT_CLASSES, LabelDistribution
from .lora import TrainConfig
from .reports import format_pct

#: Compact per-class key spellings for the flat score output.
_CLASS_KEYS = {
    "Yes": "Yes",
    "To some extent": "ToSomeExtent",
    "No": "No",
    "Positive": "Positive",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tutoreval",
        description="Preprocess tutor-response corpora, score predictions, "
        "aggregate ensembles, and render reports.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="export one track's instruction JSONL")
    p.add_argument("--input", required=True, help="raw corpus JSON file")
    p.add_argument("--track", required=True, help="track name in snake_case")
    p.add_argument(
        "--include-unlabeled",
        action="store_true",
        help="emit every (dialogue, tutor) pair without gold outputs",
    )
    p.add_argument("--out", required=True, help="output JSONL path")

    p = sub.add_parser("score", help="score predictions against gold labels")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--mode", choices=["strict", "lenient", "both"], default="both")
    p.add_argument("--per-class", action="store_true", help="also print per-class blocks")

    p = sub.add_parser("ensemble", help="aggregate M prediction runs into final labels")
    p.add_argument("--preds", required=True, help="comma-separated prediction JSONL paths")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--tse-freq", type=Fraction, help="reference 'To some extent' frequency")
    group.add_argument("--dev-gold", help="gold JSONL to measure the reference from")
    p.add_argument("--out", required=True, help="final prediction JSONL path")
    p.add_argument("--audit", help="optional audit JSONL path")

    p = sub.add_parser("distribution", help="print the label frequency table of a file")
    p.add_argument("--labels", required=True)

    p = sub.add_parser("simulate", help="generate a synthetic gold set and vote matrix")
    p.add_argument("--n", type=int, help="number of instances")
    p.add_argument("--models", type=int, help="number of ensemble members")
    p.add_argument("--seed", type=int)
    p.add_argument("--profile", required=True, help="profile JSON path")
    p.add_argument("--out-gold", required=True)
    p.add_argument("--out-preds", required=True)

    p = sub.add_parser("report", help="render result tables")
    report_sub = p.add_subparsers(dest="report_command", required=True)
    runs = report_sub.add_parser("runs", help="render a run-result table")
    runs.add_argument("--results", required=True, help="run-result TSV path")
    runs.add_argument("--format", choices=["markdown", "tsv"], default="markdown")
    dists = report_sub.add_parser("distributions", help="compare label distributions")
    dists.add_argument(
        "--inputs", required=True, help="comma-separated name=path label JSONL inputs"
    )

    p = sub.add_parser("config", help="training configuration record")
    config_sub = p.add_subparsers(dest="config_command", required=True)
    config_sub.add_parser("show", help="print the default configuration")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _dispatch(args)
    except TutorEvalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        name = getattr(exc, "filename", None)
        where = f" ({name})" if name else ""
        print(f"error: {exc.strerror or exc}{where}", file=sys.stderr)
        return 1


def _dispatch(args: argparse.Namespace) -> int:
    handlers = {
        "preprocess": _cmd_preprocess,
        "score": _cmd_score,
        "ensemble": _cmd_ensemble,
        "distribution": _cmd_distribution,
        "simulate": _cmd_simulate,
        "report": _cmd_report,
        "config": _cmd_config,
    }
    return handlers[args.command](args)


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _write(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def _cmd_preprocess(args: argparse.Namespace) -> int:
    dialogues = corpus.parse_corpus(_read(args.input))
    track = corpus.Track.from_name(args.track)
    document = corpus.export_track_jsonl(
        dialogues, track, include_labels=not args.include_unlabeled
    )
    _write(args.out, document)
    return 0


def _print_report(prefix: str, report: metrics.ScoreReport, per_class: bool) -> None:
    print(f"{prefix}_macro_f1={format_pct(float(report.macro_f1) * 100)}")
    print(f"{prefix}_accuracy={format_pct(float(report.accuracy) * 100)}")
    if per_class:
        for cls, scores in report.per_class.items():
            key = _CLASS_KEYS[cls.text]
            print(f"{prefix}_class.{key}.precision={format_pct(float(scores.precision) * 100)}")
            print(f"{prefix}_class.{key}.recall={format_pct(float(scores.recall) * 100)}")
            print(f"{prefix}_class.{key}.f1={format_pct(float(scores.f1) * 100)}")
            print(f"{prefix}_class.{key}.support={scores.support}")


def _cmd_score(args: argparse.Namespace) -> int:
    gold = metrics.read_label_file(_read(args.gold))
    predicted = metrics.read_label_file(_read(args.pred))
    pairs = metrics.join_labels(gold, predicted)
    if args.mode in ("strict", "both"):
        _print_report("strict", metrics.score(pairs, "strict"), args.per_class)
    if args.mode in ("lenient", "both"):
        _print_report("lenient", metrics.score(pairs, "lenient"), args.per_class)
    return 0


def _is_combined_votes(document: str) -> bool:
    import json

    for line in document.split("\n"):
        if line.strip():
            try:
                record = json.loads(line)
            except json.JSONDecodeError:
                return False
            return isinstance(record, dict) and "votes" in record
    return False


def _cmd_ensemble(args: argparse.Namespace) -> int:
    paths = [path for path in args.preds.split(",") if path]
    documents = [_read(path) for path in paths]
    if len(documents) == 1 and _is_combined_votes(documents[0]):
        matrix = ensemble.matrix_from_combined_file(documents[0])
    else:
        matrix = ensemble.matrix_from_prediction_files(documents)

    if args.tse_freq is not None:
        reference = LabelDistribution.from_tse_frequency(args.tse_freq)
    else:
        gold = metrics.read_label_file(_read(args.dev_gold))
        reference = LabelDistribution.from_labels(gold.values())

    decisions = ensemble.aggregate(matrix, reference)
    _write(
        args.out,
        dump_jsonl([{"id": d.instance_id, "label": d.final.text} for d in decisions]),
    )
    if args.audit:
        _write(
            args.audit,
            dump_jsonl(
                [
                    {
                        "id": d.instance_id,
                        "final": d.final.text,
                        "basis": d.basis.value,
                        "counts": {label.text: d.vote_counts[label] for label in STRICT_CLASSES},
                    }
                    for d in decisions
                ]
            ),
        )
    return 0


def _cmd_distribution(args: argparse.Namespace) -> int:
    labels = metrics.read_label_file(_read(args.labels))
    distribution = LabelDistribution.from_labels(labels.values())
    width = max(len(label.text) for label in STRICT_CLASSES)
    for label in STRICT_CLASSES:
        pct = format_pct(float(distribution.get(label)) * 100) + "%"
        print(f"{label.text.ljust(width)}  {pct.rjust(7)}")
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    profile = harness.parse_profile(
        _read(args.profile), n_instances=args.n, n_models=args.models, seed=args.seed
    )
    gold, matrix = harness.simulate(profile)
    _write(
        args.out_gold,
        dump_jsonl(
            [
                {"id": instance_id, "label": label.text}
                for instance_id, label in zip(matrix.instance_ids, gold)
            ]
        ),
    )
    _write(
        args.out_preds,
        dump_jsonl(
            [
                {"id": instance_id, "votes": [vote.text for vote in votes]}
                for instance_id, votes in zip(matrix.instance_ids, matrix.votes)
            ]
        ),
    )
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    if args.report_command == "runs":
        results = reports.parse_run_results(_read(args.results))
        print(reports.render_run_table(results, format=args.format), end="")
        return 0
    named = []
    for part in args.inputs.split(","):
        if not part:
            continue
        name, _, path = part.partition("=")
        if not name or not path:
            raise ValidationError(f"bad --inputs entry {part!r}; expected name=path")
        labels = metrics.read_label_file(_read(path))
        named.append((name, LabelDistribution.from_labels(labels.values())))
    print(reports.render_distribution_report(named), end="")
    return 0


def _cmd_config(args: argparse.Namespace) -> int:
    print(TrainConfig().to_text(), end="")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
