import json
import sys
from pathlib import Path

import pytest

SRC = Path(__file__).resolve().parents[1] / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

from tutoreval.labels import Label  # noqa: E402
from tutoreval.metrics import LabeledPair  # noqa: E402

YES, TSE, NO = Label.YES, Label.TO_SOME_EXTENT, Label.NO

SIX_PAIR_GOLD = [YES, YES, NO, TSE, NO, YES]
SIX_PAIR_PRED = [YES, TSE, NO, TSE, YES, YES]

ALL_TRACK_KEYS = [
    "Mistake_Identification",
    "Mistake_Location",
    "Providing_Guidance",
    "Actionability",
]


@pytest.fixture
def six_pairs() -> list[LabeledPair]:
    return [
        LabeledPair(f"conv{i}|tutor", gold, pred)
        for i, (gold, pred) in enumerate(zip(SIX_PAIR_GOLD, SIX_PAIR_PRED))
    ]


def make_raw_corpus(
    n_dialogues: int = 2,
    n_responses: int = 2,
    annotate: bool = True,
    turns: int = 2,
    source: str | None = None,
) -> str:
    """Build a small raw corpus document with uniform 'Yes' annotations."""
    data = []
    for d in range(n_dialogues):
        history = []
        for t in range(turns):
            speaker = "student" if t % 2 == 0 else "tutor"
            history.append({"speaker": speaker, "text": f"turn {t} of dialogue {d}"})
        responses = {}
        for r in range(n_responses):
            body: dict = {"text": f"response {r} for dialogue {d}"}
            if annotate:
                body["annotations"] = {key: "Yes" for key in ALL_TRACK_KEYS}
            responses[f"tutor{r}"] = body
        entry: dict = {"conversation_id": f"conv{d:03d}", "history": history}
        if source is not None:
            entry["source"] = source
        entry["tutor_responses"] = responses
        data.append(entry)
    return json.dumps(data)


def write_label_jsonl(path: Path, labels: list[tuple[str, Label]]) -> None:
    path.write_text(
        "".join(
            json.dumps({"id": instance_id, "label": label.text}) + "\n"
            for instance_id, label in labels
        ),
        encoding="utf-8",
    )
