"""Line-delimited JSON reading and writing.

Documents are UTF-8 with LF line endings and no trailing blank line; an
empty document is the empty string.
"""

from __future__ import annotations

import json
from typing import Any

from .errors import ParseError


def read_jsonl(text: str) -> list[dict[str, Any]]:
    """Parse a JSONL document into one dict per non-empty line.

    Raises ParseError with the 1-based line number on malformed lines.
    """
    records = []
    for lineno, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
        if not isinstance(record, dict):
            raise ParseError(f"line {lineno}: expected a JSON object")
        records.append(record)
    return records


def dump_jsonl(records: list[dict[str, Any]]) -> str:
    """Serialize records one per line; key order follows dict insertion order."""
    if not records:
        return ""
    lines = [json.dumps(record, ensure_ascii=False) for record in records]
    return "\n".join(lines) + "\n"
