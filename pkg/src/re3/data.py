"""Benchmark records and their JSONL serialization.

A document is text plus two optional timestamps: the clue time ``t_c`` its
content talks about, and the publication time ``t_d`` it was produced.
A query is text plus an optional anchor time ``t_q``, the id of its gold
document, and a scenario tag (``rel``, ``rec``, or ``hyb``) saying which
timestamps matter for evaluation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from re3.dates import DateError, PartialDate

SCENARIOS = ("rel", "rec", "hyb")


class DataError(ValueError):
    """Raised for malformed benchmark records."""


@dataclass(frozen=True)
class Document:
    doc_id: str
    text: str
    t_c: PartialDate | None = None
    t_d: PartialDate | None = None


@dataclass(frozen=True)
class Query:
    query_id: str
    text: str
    gold: str
    scenario: str
    t_q: PartialDate | None = None

    def __post_init__(self) -> None:
        if self.scenario not in SCENARIOS:
            raise DataError(f"unknown scenario: {self.scenario!r}")


def _parse_date(value: object, where: str) -> PartialDate | None:
    if value is None:
        return None
    if not isinstance(value, str):
        raise DataError(f"{where}: timestamp must be a string or null")
    try:
        return PartialDate.parse(value)
    except DateError as exc:
        raise DataError(f"{where}: {exc}") from None


def _fmt(date: PartialDate | None) -> str | None:
    return None if date is None else date.isoformat()


def document_to_record(doc: Document) -> dict:
    return {"id": doc.doc_id, "text": doc.text, "t_c": _fmt(doc.t_c), "t_d": _fmt(doc.t_d)}


def query_to_record(query: Query) -> dict:
    return {
        "id": query.query_id,
        "text": query.text,
        "t_q": _fmt(query.t_q),
        "gold": query.gold,
        "scenario": query.scenario,
    }


def _record_from_line(line: str, where: str) -> dict:
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise DataError(f"{where}: invalid JSON: {exc}") from None
    if not isinstance(record, dict):
        raise DataError(f"{where}: record must be an object")
    return record


def document_from_record(record: dict, where: str = "record") -> Document:
    try:
        return Document(
            doc_id=str(record["id"]),
            text=str(record["text"]),
            t_c=_parse_date(record.get("t_c"), where),
            t_d=_parse_date(record.get("t_d"), where),
        )
    except KeyError as exc:
        raise DataError(f"{where}: missing field {exc}") from None


def query_from_record(record: dict, where: str = "record") -> Query:
    try:
        return Query(
            query_id=str(record["id"]),
            text=str(record["text"]),
            gold=str(record["gold"]),
            scenario=str(record["scenario"]),
            t_q=_parse_date(record.get("t_q"), where),
        )
    except KeyError as exc:
        raise DataError(f"{where}: missing field {exc}") from None


def _write_jsonl(path: str | Path, records: list[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True))
            fh.write("\n")


def _read_jsonl(path: str | Path) -> list[tuple[dict, str]]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if line.strip():
                out.append((_record_from_line(line, f"{path}:{lineno}"), f"{path}:{lineno}"))
    return out


def write_documents(path: str | Path, docs: list[Document]) -> None:
    _write_jsonl(path, [document_to_record(d) for d in docs])


def read_documents(path: str | Path) -> list[Document]:
    return [document_from_record(rec, where) for rec, where in _read_jsonl(path)]


def write_queries(path: str | Path, queries: list[Query]) -> None:
    _write_jsonl(path, [query_to_record(q) for q in queries])


def read_queries(path: str | Path) -> list[Query]:
    return [query_from_record(rec, where) for rec, where in _read_jsonl(path)]


def read_dataset(directory: str | Path) -> tuple[list[Document], list[Query]]:
    """Load the docs.jsonl / queries.jsonl pair a generated benchmark holds."""
    directory = Path(directory)
    docs = read_documents(directory / "docs.jsonl")
    queries = read_queries(directory / "queries.jsonl")
    ids = {d.doc_id for d in docs}
    for query in queries:
        if query.gold not in ids:
            raise DataError(f"query {query.query_id!r}: gold {query.gold!r} not in corpus")
    return docs, queries
