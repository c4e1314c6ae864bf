"""Tutor-response evaluation toolkit.

Corpus preprocessing into per-track instruction JSONL, strict and lenient
macro-F1/accuracy scoring, distribution-calibrated ensemble aggregation,
low-rank adapter numerics, seeded simulation, and report rendering.
"""

from .corpus import (
    InstructionRecord,
    Track,
    TutorDialogue,
    TutorResponse,
    Turn,
    build_instruction_record,
    export_corpus,
    export_track_jsonl,
    flatten_dialogue,
    parse_corpus,
    parse_track_jsonl,
)
from .ensemble import (
    Basis,
    EnsembleDecision,
    PredictionMatrix,
    aggregate,
    output_distribution,
    plurality,
    tally,
)
from .errors import TutorEvalError
from .labels import Label, LabelDistribution, LenientLabel, parse_label
from .lora import (
    LoraAdapter,
    TrainConfig,
    adapter_gradients,
    clip_gradient,
    delta_w,
    effective_weight,
    init_adapter,
    warmup_lr,
)
from .metrics import (
    ConfusionMatrix,
    LabeledPair,
    ScoreReport,
    accuracy,
    build_confusion,
    macro_f1,
    score,
    to_lenient,
)
from .reports import RunResult, render_distribution_report, render_run_table
from .harness import SimProfile, XorShift64Star, simulate

__version__ = "0.1.0"

__all__ = [
    "Basis",
    "ConfusionMatrix",
    "EnsembleDecision",
    "InstructionRecord",
    "Label",
    "LabelDistribution",
    "LabeledPair",
    "LenientLabel",
    "LoraAdapter",
    "PredictionMatrix",
    "RunResult",
    "ScoreReport",
    "SimProfile",
    "Track",
    "TrainConfig",
    "TutorDialogue",
    "TutorEvalError",
    "TutorResponse",
    "Turn",
    "XorShift64Star",
    "accuracy",
    "adapter_gradients",
    "aggregate",
    "build_confusion",
    "build_instruction_record",
    "clip_gradient",
    "delta_w",
    "effective_weight",
    "export_corpus",
    "export_track_jsonl",
    "flatten_dialogue",
    "init_adapter",
    "macro_f1",
    "output_distribution",
    "parse_corpus",
    "parse_label",
    "parse_track_jsonl",
    "plurality",
    "render_distribution_report",
    "render_run_table",
    "score",
    "simulate",
    "tally",
    "to_lenient",
    "warmup_lr",
]
