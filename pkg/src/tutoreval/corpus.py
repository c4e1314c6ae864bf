"""Dialogue corpus model and its transformation into instruction JSONL.

The raw corpus is one JSON array of conversations, each with an ordered
student/tutor history and a map of candidate tutor responses carrying
optional per-track annotations. ``export_track_jsonl`` turns a corpus into
the flat instruction format used for supervised fine-tuning: one record per
(conversation, tutor response) pair with the track's embedded prompt, a
flattened dialogue rendering, and the gold label when present.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

from . import templates
from .errors import DuplicateIdError, ParseError, SchemaError
from .jsonl import dump_jsonl, read_jsonl
from .labels import Label, parse_label

ID_SEPARATOR = "|"
RESPONSE_JOINER = "\n\nTutor response to evaluate:\n"


class Role(enum.Enum):
    STUDENT = "student"
    TUTOR = "tutor"


class Track(enum.Enum):
    """One of the four dimensions a tutor response is judged on."""

    MISTAKE_IDENTIFICATION = "mistake_identification"
    MISTAKE_LOCATION = "mistake_location"
    PROVIDING_GUIDANCE = "providing_guidance"
    ACTIONABILITY = "actionability"

    @classmethod
    def from_name(cls, name: str) -> "Track":
        for track in cls:
            if track.value == name:
                return track
        expected = ", ".join(track.value for track in cls)
        raise SchemaError(f"unknown track {name!r}; expected one of {expected}")

    @property
    def annotation_key(self) -> str:
        """Field name under which raw corpus files store this track's label."""
        return _ANNOTATION_KEYS[self]

    @property
    def display_name(self) -> str:
        return self.value.replace("_", " ").title()

    @property
    def template(self) -> str:
        return _TEMPLATES[self]


_ANNOTATION_KEYS = {
    Track.MISTAKE_IDENTIFICATION: "Mistake_Identification",
    Track.MISTAKE_LOCATION: "Mistake_Location",
    Track.PROVIDING_GUIDANCE: "Providing_Guidance",
    Track.ACTIONABILITY: "Actionability",
}

_TEMPLATES = {
    Track.MISTAKE_IDENTIFICATION: templates.MISTAKE_IDENTIFICATION_TEMPLATE,
    Track.MISTAKE_LOCATION: templates.MISTAKE_LOCATION_TEMPLATE,
    Track.PROVIDING_GUIDANCE: templates.PROVIDING_GUIDANCE_TEMPLATE,
    Track.ACTIONABILITY: templates.ACTIONABILITY_TEMPLATE,
}

_ROLE_RENDERING = {Role.STUDENT: "Student", Role.TUTOR: "Tutor"}


@dataclass(frozen=True)
class Turn:
    speaker: Role
    text: str

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise SchemaError("turn text must be non-empty")


@dataclass(frozen=True)
class TutorResponse:
    tutor_id: str
    text: str
    annotations: dict[Track, Label] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise SchemaError(f"response text for tutor {self.tutor_id!r} must be non-empty")


@dataclass(frozen=True)
class TutorDialogue:
    """One multi-turn conversation plus its candidate tutor responses."""

    conversation_id: str
    history: tuple[Turn, ...]
    responses: dict[str, TutorResponse]
    source: str | None = None

    def __post_init__(self) -> None:
        if not self.conversation_id:
            raise SchemaError("conversation_id must be non-empty")
        if not self.history:
            raise SchemaError(f"conversation {self.conversation_id!r} has an empty history")
        if not self.responses:
            raise SchemaError(f"conversation {self.conversation_id!r} has no tutor responses")


@dataclass(frozen=True)
class InstructionRecord:
    """A flattened two-turn training instance for one track.

    No system-role content exists anywhere in the record: the prompt carries
    the task, the input carries the dialogue, the output carries the label.
    """

    instance_id: str
    instruction: str
    input: str
    output: Label | None = None

    def __post_init__(self) -> None:
        parts = self.instance_id.split(ID_SEPARATOR)
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise SchemaError(
                f"instance id {self.instance_id!r} is not of the form "
                f"<conversation_id>{ID_SEPARATOR}<tutor_id>"
            )
        if not self.instruction.startswith("TASK DEFINITION:"):
            raise SchemaError("instruction must begin with 'TASK DEFINITION:'")
        if "EVALUATION CRITERIA:" not in self.instruction:
            raise SchemaError("instruction must contain an 'EVALUATION CRITERIA:' section")


def instance_id(conversation_id: str, tutor_id: str) -> str:
    """Join the two key parts into the stable prediction-join key."""
    for part, name in ((conversation_id, "conversation_id"), (tutor_id, "tutor_id")):
        if ID_SEPARATOR in part:
            raise SchemaError(f"{name} {part!r} contains the reserved separator {ID_SEPARATOR!r}")
        if not part:
            raise SchemaError(f"{name} must be non-empty")
    return conversation_id + ID_SEPARATOR + tutor_id


def parse_corpus(raw_document: str) -> list[TutorDialogue]:
    """Parse a raw corpus JSON document into validated dialogues, in input order."""
    try:
        data = json.loads(raw_document)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: invalid JSON ({exc.msg})") from exc
    if not isinstance(data, list):
        raise SchemaError("corpus document must be a top-level JSON array")

    dialogues = []
    seen_ids: set[str] = set()
    for index, entry in enumerate(data):
        where = f"conversation #{index}"
        if not isinstance(entry, dict):
            raise SchemaError(f"{where}: expected a JSON object")
        conversation_id = _require(entry, "conversation_id", where, str)
        where = f"conversation {conversation_id!r}"
        if conversation_id in seen_ids:
            raise DuplicateIdError(f"duplicate conversation_id {conversation_id!r}")
        seen_ids.add(conversation_id)

        source = entry.get("source")
        if source is not None and not isinstance(source, str):
            raise SchemaError(f"{where}: field 'source' must be a string")

        history = tuple(
            _parse_turn(turn, f"{where}, turn #{i}")
            for i, turn in enumerate(_require(entry, "history", where, list))
        )
        responses_field = _require(entry, "tutor_responses", where, dict)
        responses = {
            tutor_id: _parse_response(tutor_id, body, f"{where}, tutor {tutor_id!r}")
            for tutor_id, body in responses_field.items()
        }
        dialogues.append(
            TutorDialogue(
                conversation_id=conversation_id,
                history=history,
                responses=responses,
                source=source,
            )
        )
    return dialogues


def _require(record: dict, key: str, where: str, expected_type: type):
    if key not in record:
        raise SchemaError(f"{where}: missing required field {key!r}")
    value = record[key]
    if not isinstance(value, expected_type):
        raise SchemaError(f"{where}: field {key!r} must be of type {expected_type.__name__}")
    return value


def _parse_turn(turn, where: str) -> Turn:
    if not isinstance(turn, dict):
        raise SchemaError(f"{where}: expected a JSON object")
    speaker = _require(turn, "speaker", where, str)
    text = _require(turn, "text", where, str)
    try:
        role = Role(speaker)
    except ValueError:
        raise SchemaError(f"{where}: speaker must be 'student' or 'tutor', got {speaker!r}") from None
    if not text.strip():
        raise SchemaError(f"{where}: turn text must be non-empty")
    return Turn(speaker=role, text=text)


def _parse_response(tutor_id: str, body, where: str) -> TutorResponse:
    if not isinstance(body, dict):
        raise SchemaError(f"{where}: expected a JSON object")
    text = _require(body, "text", where, str)
    if not text.strip():
        raise SchemaError(f"{where}: response text must be non-empty")
    annotations: dict[Track, Label] = {}
    raw_annotations = body.get("annotations")
    if raw_annotations is not None:
        if not isinstance(raw_annotations, dict):
            raise SchemaError(f"{where}: field 'annotations' must be an object")
        key_to_track = {track.annotation_key: track for track in Track}
        for key, value in raw_annotations.items():
            if key not in key_to_track:
                raise SchemaError(f"{where}: unknown annotation key {key!r}")
            if not isinstance(value, str):
                raise SchemaError(f"{where}: annotation {key!r} must be a string label")
            annotations[key_to_track[key]] = parse_label(value)
    return TutorResponse(tutor_id=tutor_id, text=text, annotations=annotations)


def export_corpus(dialogues: list[TutorDialogue]) -> str:
    """Serialize dialogues back to the raw corpus format (round-trips with parse)."""
    data = []
    for dialogue in dialogues:
        entry: dict = {"conversation_id": dialogue.conversation_id}
        if dialogue.source is not None:
            entry["source"] = dialogue.source
        entry["history"] = [
            {"speaker": turn.speaker.value, "text": turn.text} for turn in dialogue.history
        ]
        entry["tutor_responses"] = {
            tutor_id: _response_json(response)
            for tutor_id, response in dialogue.responses.items()
        }
        data.append(entry)
    return json.dumps(data, ensure_ascii=False, indent=2) + "\n"


def _response_json(response: TutorResponse) -> dict:
    body: dict = {"text": response.text}
    if response.annotations:
        body["annotations"] = {
            track.annotation_key: label.text
            for track, label in sorted(response.annotations.items(), key=lambda kv: kv[0].value)
        }
    return body


def flatten_dialogue(dialogue: TutorDialogue) -> str:
    """Render the history as one "Student:"/"Tutor:" line per turn, in order."""
    return "\n".join(
        f"{_ROLE_RENDERING[turn.speaker]}: {turn.text}" for turn in dialogue.history
    )


def build_instruction_record(
    dialogue: TutorDialogue, tutor_id: str, track: Track
) -> InstructionRecord:
    """Build the instruction instance for one tutor response on one track."""
    if tutor_id not in dialogue.responses:
        known = ", ".join(sorted(dialogue.responses))
        raise SchemaError(
            f"conversation {dialogue.conversation_id!r} has no tutor {tutor_id!r} (has: {known})"
        )
    response = dialogue.responses[tutor_id]
    return InstructionRecord(
        instance_id=instance_id(dialogue.conversation_id, tutor_id),
        instruction=track.template,
        input=flatten_dialogue(dialogue) + RESPONSE_JOINER + response.text,
        output=response.annotations.get(track),
    )


def export_track_jsonl(
    dialogues: list[TutorDialogue], track: Track, include_labels: bool = True
) -> str:
    """Emit the track's instruction JSONL, sorted by instance id.

    With include_labels on (the training export) only pairs annotated for the
    track are emitted and each record carries its gold output. With it off
    (the blind/inference export) every pair is emitted and no outputs are
    written.
    """
    records = []
    for dialogue in dialogues:
        for tutor_id, response in dialogue.responses.items():
            if include_labels and track not in response.annotations:
                continue
            records.append(build_instruction_record(dialogue, tutor_id, track))
    records.sort(key=lambda record: record.instance_id)

    rows = []
    for record in records:
        row: dict = {
            "id": record.instance_id,
            "instruction": record.instruction,
            "input": record.input,
        }
        if include_labels and record.output is not None:
            row["output"] = record.output.text
        rows.append(row)
    return dump_jsonl(rows)


def parse_track_jsonl(document: str) -> list[InstructionRecord]:
    """Parse an instruction JSONL document back into records."""
    records = []
    seen: set[str] = set()
    for index, row in enumerate(read_jsonl(document)):
        where = f"record #{index}"
        record_id = _require(row, "id", where, str)
        if record_id in seen:
            raise DuplicateIdError(f"duplicate record id {record_id!r}")
        seen.add(record_id)
        instruction = _require(row, "instruction", where, str)
        input_text = _require(row, "input", where, str)
        output = None
        if "output" in row:
            if not isinstance(row["output"], str):
                raise SchemaError(f"{where}: field 'output' must be a string label")
            output = parse_label(row["output"])
        records.append(
            InstructionRecord(
                instance_id=record_id,
                instruction=instruction,
                input=input_text,
                output=output,
            )
        )
    return records
