import json
import random

import pytest

from conftest import make_raw_corpus
from tutoreval.corpus import (
    Role,
    Track,
    Turn,
    TutorDialogue,
    TutorResponse,
    build_instruction_record,
    export_corpus,
    export_track_jsonl,
    flatten_dialogue,
    parse_corpus,
    parse_track_jsonl,
)
from tutoreval.errors import (
    DuplicateIdError,
    LabelParseError,
    ParseError,
    SchemaError,
)
from tutoreval.labels import Label

RAW_ONE_CONVERSATION = """
[
  {
    "conversation_id": "bridge-007",
    "source": "Bridge",
    "history": [
      {"speaker": "student", "text": "I think 7 x 8 = 54."},
      {"speaker": "tutor", "text": "Walk me through how you got 54."}
    ],
    "tutor_responses": {
      "GPT4": {
        "text": "Check 7 x 8 again; compare it with 7 x 10 - 7 x 2.",
        "annotations": {
          "Mistake_Identification": "Yes",
          "Mistake_Location": "To some extent",
          "Providing_Guidance": "Yes",
          "Actionability": "No"
        }
      },
      "Novice": {
        "text": "That is wrong."
      }
    }
  }
]
"""


def _dialogue(history=None, responses=None, conversation_id="conv001"):
    history = history or (Turn(Role.STUDENT, "Hi"), Turn(Role.TUTOR, "Hello"))
    responses = responses or {
        "GPT4": TutorResponse(
            "GPT4", "Try again.", {Track.MISTAKE_IDENTIFICATION: Label.YES}
        )
    }
    return TutorDialogue(conversation_id, tuple(history), responses)


class TestParseCorpus:
    def test_single_conversation_two_responses(self):
        dialogues = parse_corpus(RAW_ONE_CONVERSATION)
        assert len(dialogues) == 1
        dialogue = dialogues[0]
        assert dialogue.conversation_id == "bridge-007"
        assert dialogue.source == "Bridge"
        assert len(dialogue.history) == 2
        assert dialogue.history[0].speaker is Role.STUDENT
        assert set(dialogue.responses) == {"GPT4", "Novice"}
        gpt4 = dialogue.responses["GPT4"]
        assert gpt4.annotations[Track.MISTAKE_LOCATION] is Label.TO_SOME_EXTENT
        assert dialogue.responses["Novice"].annotations == {}

    def test_empty_document(self):
        assert parse_corpus("[]") == []

    def test_order_preserved(self):
        document = make_raw_corpus(n_dialogues=5)
        ids = [d.conversation_id for d in parse_corpus(document)]
        assert ids == sorted(ids) == [f"conv{i:03d}" for i in range(5)]

    def test_malformed_json_reports_position(self):
        with pytest.raises(ParseError, match=r"line \d+"):
            parse_corpus('[{"conversation_id": }]')

    def test_missing_field_named(self):
        document = json.dumps([{"conversation_id": "c1", "history": []}])
        with pytest.raises(SchemaError, match="tutor_responses"):
            parse_corpus(document)

    def test_duplicate_conversation_id(self):
        entry = json.loads(make_raw_corpus(n_dialogues=1))[0]
        with pytest.raises(DuplicateIdError, match="conv000"):
            parse_corpus(json.dumps([entry, entry]))

    def test_bad_speaker_role(self):
        document = json.dumps(
            [
                {
                    "conversation_id": "c1",
                    "history": [{"speaker": "teacher", "text": "hi"}],
                    "tutor_responses": {"t": {"text": "x"}},
                }
            ]
        )
        with pytest.raises(SchemaError, match="teacher"):
            parse_corpus(document)

    def test_bad_annotation_label(self):
        document = json.dumps(
            [
                {
                    "conversation_id": "c1",
                    "history": [{"speaker": "student", "text": "hi"}],
                    "tutor_responses": {
                        "t": {
                            "text": "x",
                            "annotations": {"Actionability": "Maybe"},
                        }
                    },
                }
            ]
        )
        with pytest.raises(LabelParseError, match="Maybe"):
            parse_corpus(document)

    def test_unknown_annotation_key(self):
        document = json.dumps(
            [
                {
                    "conversation_id": "c1",
                    "history": [{"speaker": "student", "text": "hi"}],
                    "tutor_responses": {
                        "t": {"text": "x", "annotations": {"Politeness": "Yes"}}
                    },
                }
            ]
        )
        with pytest.raises(SchemaError, match="Politeness"):
            parse_corpus(document)

    def test_empty_history_rejected(self):
        document = json.dumps(
            [
                {
                    "conversation_id": "c1",
                    "history": [],
                    "tutor_responses": {"t": {"text": "x"}},
                }
            ]
        )
        with pytest.raises(SchemaError, match="history"):
            parse_corpus(document)

    def test_blank_turn_text_rejected(self):
        document = json.dumps(
            [
                {
                    "conversation_id": "c1",
                    "history": [{"speaker": "student", "text": "   "}],
                    "tutor_responses": {"t": {"text": "x"}},
                }
            ]
        )
        with pytest.raises(SchemaError, match="non-empty"):
            parse_corpus(document)


class TestFlatten:
    def test_two_turns(self):
        dialogue = _dialogue()
        assert flatten_dialogue(dialogue) == "Student: Hi\nTutor: Hello"

    def test_single_turn(self):
        dialogue = _dialogue(history=(Turn(Role.STUDENT, "2+2=5"),))
        assert flatten_dialogue(dialogue) == "Student: 2+2=5"

    def test_four_turns_keep_order(self):
        history = tuple(
            Turn(Role.STUDENT if i % 2 == 0 else Role.TUTOR, f"t{i}") for i in range(4)
        )
        lines = flatten_dialogue(_dialogue(history=history)).split("\n")
        assert lines == ["Student: t0", "Tutor: t1", "Student: t2", "Tutor: t3"]


class TestBuildInstructionRecord:
    def test_mistake_identification(self):
        dialogues = parse_corpus(RAW_ONE_CONVERSATION)
        record = build_instruction_record(dialogues[0], "GPT4", Track.MISTAKE_IDENTIFICATION)
        assert record.instance_id == "bridge-007|GPT4"
        assert "accurately identifies a mistake" in record.instruction
        assert record.instruction == Track.MISTAKE_IDENTIFICATION.template
        assert record.output is Label.YES
        assert record.input.startswith("Student: I think 7 x 8 = 54.")
        assert "\n\nTutor response to evaluate:\nCheck 7 x 8 again" in record.input

    def test_actionability_phrase(self):
        dialogues = parse_corpus(RAW_ONE_CONVERSATION)
        record = build_instruction_record(dialogues[0], "GPT4", Track.ACTIONABILITY)
        assert "clearly suggests what the student should do next" in record.instruction
        assert record.output is Label.NO

    def test_blind_response_has_no_output(self):
        dialogues = parse_corpus(RAW_ONE_CONVERSATION)
        record = build_instruction_record(dialogues[0], "Novice", Track.ACTIONABILITY)
        assert record.output is None
        assert record.instance_id == "bridge-007|Novice"

    def test_unknown_tutor(self):
        dialogues = parse_corpus(RAW_ONE_CONVERSATION)
        with pytest.raises(SchemaError, match="Claude"):
            build_instruction_record(dialogues[0], "Claude", Track.ACTIONABILITY)

    def test_separator_in_id_rejected(self):
        dialogue = _dialogue(
            conversation_id="conv|zero",
        )
        with pytest.raises(SchemaError, match="separator"):
            build_instruction_record(dialogue, "GPT4", Track.MISTAKE_IDENTIFICATION)

    def test_no_system_role_content(self):
        dialogues = parse_corpus(RAW_ONE_CONVERSATION)
        record = build_instruction_record(dialogues[0], "GPT4", Track.PROVIDING_GUIDANCE)
        assert "system" not in record.instruction.lower()
        assert "system" not in record.input.lower()


class TestExport:
    def test_two_by_two_gives_four_lines(self):
        dialogues = parse_corpus(make_raw_corpus(n_dialogues=2, n_responses=2))
        document = export_track_jsonl(dialogues, Track.ACTIONABILITY)
        assert document.count("\n") == 4
        assert not document.endswith("\n\n")

    def test_empty_corpus_gives_empty_document(self):
        assert export_track_jsonl([], Track.ACTIONABILITY) == ""

    def test_lines_sorted_by_instance_id(self):
        dialogues = parse_corpus(make_raw_corpus(n_dialogues=3, n_responses=2))
        document = export_track_jsonl(dialogues, Track.MISTAKE_LOCATION)
        ids = [json.loads(line)["id"] for line in document.splitlines()]
        assert ids == sorted(ids)

    def test_unlabeled_export_covers_all_pairs_without_outputs(self):
        mixed = json.loads(make_raw_corpus(n_dialogues=2, n_responses=2))
        del mixed[0]["tutor_responses"]["tutor0"]["annotations"]
        dialogues = parse_corpus(json.dumps(mixed))

        labeled = export_track_jsonl(dialogues, Track.ACTIONABILITY, include_labels=True)
        assert len(labeled.splitlines()) == 3

        blind = export_track_jsonl(dialogues, Track.ACTIONABILITY, include_labels=False)
        rows = [json.loads(line) for line in blind.splitlines()]
        assert len(rows) == 4
        assert all("output" not in row for row in rows)

    def test_instruction_jsonl_round_trip(self):
        dialogues = parse_corpus(RAW_ONE_CONVERSATION)
        document = export_track_jsonl(dialogues, Track.MISTAKE_LOCATION)
        records = parse_track_jsonl(document)
        assert [r.instance_id for r in records] == ["bridge-007|GPT4"]
        assert records[0] == build_instruction_record(
            dialogues[0], "GPT4", Track.MISTAKE_LOCATION
        )

    def test_corpus_round_trip(self):
        original = parse_corpus(RAW_ONE_CONVERSATION)
        assert parse_corpus(export_corpus(original)) == original

    def test_export_deterministic(self):
        dialogues = parse_corpus(make_raw_corpus(n_dialogues=4, n_responses=3))
        first = export_track_jsonl(dialogues, Track.PROVIDING_GUIDANCE)
        second = export_track_jsonl(
            parse_corpus(make_raw_corpus(n_dialogues=4, n_responses=3)),
            Track.PROVIDING_GUIDANCE,
        )
        assert first == second

    def test_count_conservation_random_corpora(self):
        rng = random.Random(1234)
        labels = [label.value for label in Label]
        for _ in range(25):
            data = []
            annotated = 0
            for d in range(rng.randint(1, 6)):
                responses = {}
                for r in range(rng.randint(1, 4)):
                    body: dict = {"text": f"r{r}"}
                    if rng.random() < 0.7:
                        body["annotations"] = {"Actionability": rng.choice(labels)}
                        annotated += 1
                    responses[f"t{r}"] = body
                data.append(
                    {
                        "conversation_id": f"c{d}",
                        "history": [{"speaker": "student", "text": "q"}],
                        "tutor_responses": responses,
                    }
                )
            document = export_track_jsonl(parse_corpus(json.dumps(data)), Track.ACTIONABILITY)
            assert len(document.splitlines()) == annotated


class TestTemplates:
    CRITERION_PHRASES = {
        Track.MISTAKE_IDENTIFICATION: "accurately identifies a mistake",
        Track.MISTAKE_LOCATION: "exact location of the mistake",
        Track.PROVIDING_GUIDANCE: "provides correct and relevant guidance",
        Track.ACTIONABILITY: "clearly suggests what the student should do next",
    }

    @pytest.mark.parametrize("track", list(Track))
    def test_template_structure(self, track):
        template = track.template
        assert template.startswith("TASK DEFINITION:")
        assert "EVALUATION CRITERIA:" in template
        assert '"To some extent"' in template
        assert self.CRITERION_PHRASES[track] in template

    def test_emitted_instruction_is_template_byte_for_byte(self):
        dialogues = parse_corpus(make_raw_corpus(n_dialogues=1, n_responses=1))
        for track in Track:
            document = export_track_jsonl(dialogues, track)
            row = json.loads(document.splitlines()[0])
            assert row["instruction"] == track.template

    def test_each_track_has_distinct_template(self):
        assert len({track.template for track in Track}) == 4
