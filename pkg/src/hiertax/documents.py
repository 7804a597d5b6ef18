"""Labeled documents and their JSONL representation.

One JSON object per line with the fixed schema
``{"id": str, "text": str, "codes": [str], "source": str, "weight": number?}``.
Multiple codes express ads flagged with more than one acceptable
occupation code.  Weight defaults to 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from .errors import DataError
from .hierarchy import ClassCode


@dataclass(frozen=True)
class LabeledDocument:
    id: str
    text: str
    codes: tuple[ClassCode, ...]
    source: str = "unknown"
    weight: float = 1.0

    def __post_init__(self):
        if not self.codes:
            raise DataError(f"document {self.id!r} carries no codes")
        if self.weight <= 0:
            raise DataError(f"document {self.id!r} has non-positive weight")

    def with_codes(self, codes: Sequence[ClassCode]) -> "LabeledDocument":
        return replace(self, codes=tuple(codes))


def document_from_record(record: dict, segment_lengths: Sequence[int]) -> LabeledDocument:
    try:
        codes = tuple(
            ClassCode.parse(str(c), segment_lengths) for c in record["codes"]
        )
        return LabeledDocument(
            id=str(record["id"]),
            text=str(record.get("text", "")),
            codes=codes,
            source=str(record.get("source", "unknown")),
            weight=float(record.get("weight", 1.0)),
        )
    except KeyError as exc:
        raise DataError(f"document record missing field {exc}") from exc


def document_to_record(doc: LabeledDocument) -> dict:
    record = {
        "id": doc.id,
        "text": doc.text,
        "codes": [c.render() for c in doc.codes],
        "source": doc.source,
    }
    if doc.weight != 1.0:
        record["weight"] = doc.weight
    return record


def read_jsonl(path) -> list[dict]:
    rows = []
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    row = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise DataError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
                if not isinstance(row, dict):
                    raise DataError(f"{path}:{lineno}: expected a JSON object")
                rows.append(row)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    return rows


def write_jsonl(rows: Iterable[dict], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False))
            fh.write("\n")


def read_documents(path, segment_lengths: Sequence[int]) -> list[LabeledDocument]:
    return [document_from_record(r, segment_lengths) for r in read_jsonl(path)]


def write_documents(docs: Iterable[LabeledDocument], path) -> None:
    write_jsonl((document_to_record(d) for d in docs), path)
