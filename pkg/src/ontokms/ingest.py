"""File-based ingestion of clinical free-text records.

Records arrive as JSONL (one object per line) or CSV (header row:
record_id, table, field, text, patient_ref). Valid rows land in a record
catalog and are indexed as Record documents; malformed rows are rejected
row by row without aborting the run. patient_ref is opaque and never
interpreted.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from .errors import StorageError, ValidationError
from .text_search import DocRef, InvertedIndex

CSV_HEADER = ["record_id", "table", "field", "text", "patient_ref"]


@dataclass(frozen=True, slots=True)
class AnnotationRecord:
    record_id: str
    table: str
    field: str
    text: str
    patient_ref: str | None = None

    def to_payload(self) -> dict:
        return {
            "record_id": self.record_id,
            "table": self.table,
            "field": self.field,
            "text": self.text,
            "patient_ref": self.patient_ref,
        }


@dataclass(slots=True)
class IngestReport:
    accepted: int = 0
    rejected: int = 0
    reasons: list[str] = field(default_factory=list)

    def to_payload(self) -> dict:
        return {
            "accepted": self.accepted,
            "rejected": self.rejected,
            "reasons": list(self.reasons),
        }


class RecordCatalog:
    """All accepted records, keyed by their unique record_id."""

    def __init__(self):
        self._records: dict[str, AnnotationRecord] = {}

    def __len__(self) -> int:
        return len(self._records)

    def __contains__(self, record_id: str) -> bool:
        return record_id in self._records

    def add(self, record: AnnotationRecord):
        if record.record_id in self._records:
            raise ValidationError(f"duplicate record_id {record.record_id!r}")
        self._records[record.record_id] = record

    def get(self, record_id: str) -> AnnotationRecord | None:
        return self._records.get(record_id)

    def all_records(self) -> list[AnnotationRecord]:
        return [self._records[k] for k in sorted(self._records)]


def _coerce_row(raw: dict) -> AnnotationRecord:
    record_id = raw.get("record_id")
    if not isinstance(record_id, str) or not record_id.strip():
        raise ValidationError("missing record_id")
    text = raw.get("text")
    if not isinstance(text, str) or not text.strip():
        raise ValidationError("empty text")
    table = raw.get("table")
    fieldname = raw.get("field")
    if not isinstance(table, str) or not isinstance(fieldname, str):
        raise ValidationError("table and field must be strings")
    patient_ref = raw.get("patient_ref")
    if patient_ref is not None and not isinstance(patient_ref, str):
        raise ValidationError("patient_ref must be a string when present")
    return AnnotationRecord(
        record_id=record_id.strip(),
        table=table,
        field=fieldname,
        text=text,
        patient_ref=patient_ref or None,
    )


def _rows_from_jsonl(text: str):
    for number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
        except ValueError as exc:
            yield number, None, f"invalid JSON ({exc})"
            continue
        if not isinstance(raw, dict):
            yield number, None, "row is not an object"
            continue
        yield number, raw, None


def _rows_from_csv(text: str):
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ValidationError("missing CSV header") from None
    if header != CSV_HEADER:
        raise ValidationError(
            f"CSV header must be exactly {','.join(CSV_HEADER)}",
            detail={"found": header},
        )
    for number, row in enumerate(reader, start=1):
        if not row:
            continue
        if len(row) != len(CSV_HEADER):
            yield number, None, f"expected {len(CSV_HEADER)} columns, found {len(row)}"
            continue
        raw = dict(zip(CSV_HEADER, row))
        if raw["patient_ref"] == "":
            raw["patient_ref"] = None
        yield number, raw, None


def ingest_text(catalog: RecordCatalog, index: InvertedIndex, text: str,
                format: str) -> IngestReport:
    """Ingest already-loaded file content; see ingest_file for the semantics."""
    if format == "jsonl":
        rows = _rows_from_jsonl(text)
    elif format == "csv":
        rows = _rows_from_csv(text)
    else:
        raise ValidationError(f"unknown ingest format {format!r}")

    report = IngestReport()
    for number, raw, problem in rows:
        if problem is None:
            try:
                record = _coerce_row(raw)
                catalog.add(record)
            except ValidationError as exc:
                problem = exc.message
        if problem is not None:
            report.rejected += 1
            report.reasons.append(f"row {number}: {problem}")
            continue
        index.index_doc(DocRef("Record", record.record_id), record.text)
        report.accepted += 1
    return report


def ingest_file(catalog: RecordCatalog, index: InvertedIndex, path,
                format: str) -> IngestReport:
    """Read and ingest one file; row-level failures reject rows, not the run."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise StorageError(f"cannot read {path}: {exc}") from exc
    return ingest_text(catalog, index, text, format)


def suggest_concepts(index: InvertedIndex, text: str, k: int = 5) -> list[tuple[str, float]]:
    """Concepts whose labels best match the text, as (concept IRI, score).

    Scores are the sum of the concept's label-document scores; ties break on
    the IRI.
    """
    if k < 1:
        raise ValidationError("k must be >= 1")
    totals: dict[str, float] = {}
    for hit in index.search(text, k=max(index.doc_count, 1)):
        if hit.doc.kind != "ConceptLabel":
            continue
        totals[hit.doc.owner] = totals.get(hit.doc.owner, 0.0) + hit.score
    ranked = sorted(totals.items(), key=lambda item: (-item[1], item[0]))
    return ranked[:k]
