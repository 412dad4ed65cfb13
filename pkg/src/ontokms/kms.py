"""The knowledge base facade: one object owning store, index, catalog, and
change log, with optional directory-backed persistence.

Persistence layout under the data directory:

    store.nt       canonical N-Triples snapshot, rewritten after each mutation
    changes.jsonl  append-only change log
    records.jsonl  accepted ingest records, appended per ingest run

All mutations serialize through one re-entrant lock; reads take the same lock
briefly, trading parallelism for obvious correctness at this scale.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path

from .errors import ConflictError, StorageError
from .ingest import AnnotationRecord, IngestReport, RecordCatalog, ingest_text, suggest_concepts
from .navigation import GraphView, neighborhood, path_to_root
from .ontology_mgmt import (
    LANGS,
    ChangeLog,
    ChangeRecord,
    Concept,
    OntologyManager,
    OntologySchema,
    ValidationReport,
    generate_seed,
    validate,
)
from .rdf_store import (
    OWL_CLASS,
    RDF_TYPE,
    RDFS_COMMENT,
    RDFS_LABEL,
    Term,
    TripleStore,
    iri,
    load_snapshot,
    n3,
    parse_turtle,
    save_snapshot,
    serialize,
)
from .sparql_engine import evaluate, parse_query, select_order
from .text_search import DocRef, InvertedIndex, SearchHit

_TYPE = iri(RDF_TYPE)
_LABEL = iri(RDFS_LABEL)
_COMMENT = iri(RDFS_COMMENT)
_CLASS = iri(OWL_CLASS)

_ANNOTATION_KINDS = ((_LABEL, "ConceptLabel"), (_COMMENT, "ConceptComment"))


def build_index(store: TripleStore, catalog: RecordCatalog) -> InvertedIndex:
    """Index rebuilt from scratch; the reference the incremental path must match."""
    index = InvertedIndex()
    concepts = {t.s for t in store.match(None, _TYPE, _CLASS)}
    for pred, kind in _ANNOTATION_KINDS:
        for t in store.match(None, pred, None):
            # Only the two managed languages are searchable; the incremental
            # path below must mirror this rule exactly.
            if t.s in concepts and not t.o.is_iri and t.o.lang in LANGS:
                index.index_doc(DocRef(kind, t.s.value, t.o.lang), t.o.value)
    for record in catalog.all_records():
        index.index_doc(DocRef("Record", record.record_id), record.text)
    return index


class KnowledgeBase:
    """Facade over every subsystem, safe for concurrent callers."""

    def __init__(self, data_dir=None, schema: OntologySchema | None = None,
                 default_lang: str = "en"):
        self._lock = threading.RLock()
        self.schema = schema or OntologySchema()
        self.default_lang = default_lang
        self.data_dir = Path(data_dir) if data_dir is not None else None
        if self.data_dir is not None:
            try:
                self.data_dir.mkdir(parents=True, exist_ok=True)
            except OSError as exc:
                raise StorageError(f"cannot create data dir: {exc}") from exc

        self.store = TripleStore()
        if self._snapshot_path() is not None and self._snapshot_path().exists():
            self.store = load_snapshot(self._snapshot_path())
        self.log = ChangeLog(self._changes_path())
        self.manager = OntologyManager(self.store, self.log, self.schema)
        self.catalog = RecordCatalog()
        self._load_records()
        self.index = build_index(self.store, self.catalog)

    # -- persistence --------------------------------------------------------

    def _snapshot_path(self):
        return self.data_dir / "store.nt" if self.data_dir else None

    def _changes_path(self):
        return self.data_dir / "changes.jsonl" if self.data_dir else None

    def _records_path(self):
        return self.data_dir / "records.jsonl" if self.data_dir else None

    def _load_records(self):
        path = self._records_path()
        if path is None or not path.exists():
            return
        try:
            lines = path.read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            raise StorageError(f"cannot read records: {exc}") from exc
        for i, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            try:
                self.catalog.add(AnnotationRecord(**json.loads(line)))
            except (ValueError, TypeError) as exc:
                raise StorageError(f"corrupt records file line {i}: {exc}") from exc

    def _persist_records(self, records: list[AnnotationRecord]):
        path = self._records_path()
        if path is None or not records:
            return
        try:
            with open(path, "a", encoding="utf-8", newline="\n") as fh:
                for record in records:
                    fh.write(json.dumps(record.to_payload(), ensure_ascii=False) + "\n")
        except OSError as exc:
            raise StorageError(f"cannot append records: {exc}") from exc

    def _save(self):
        if self._snapshot_path() is not None:
            save_snapshot(self.store, self._snapshot_path())

    # -- index maintenance ----------------------------------------------------

    def _index_concept(self, concept: Concept):
        for kind, mapping in (("ConceptLabel", concept.labels),
                              ("ConceptComment", concept.comments)):
            for lang, value in mapping.items():
                if lang in LANGS:
                    self.index.index_doc(DocRef(kind, concept.id.value, lang), value)

    def _purge_concept(self, cid: Term):
        for kind in ("ConceptLabel", "ConceptComment"):
            for lang in LANGS:
                self.index.remove_doc(DocRef(kind, cid.value, lang))

    # -- ontology mutations ---------------------------------------------------

    def seed(self):
        """Install the bundled ontology; only valid on an empty store."""
        with self._lock:
            if len(self.store):
                raise ConflictError("store is not empty; refusing to seed")
            for t in generate_seed(self.schema).triples():
                self.store.insert(t)
            self.log.append("Import", "seed", {"kind": "seed"})
            self.index = build_index(self.store, self.catalog)
            self._save()
            if self.data_dir is not None:
                save_snapshot(self.store, self.data_dir / "seed.nt")

    def create_concept(self, cid: Term, parents: set[Term], labels: dict,
                       comments: dict) -> Concept:
        with self._lock:
            concept = self.manager.create_concept(cid, parents, labels, comments)
            self._index_concept(concept)
            self._save()
            return concept

    def rename_concept(self, cid: Term, new_id: Term) -> Concept:
        with self._lock:
            concept = self.manager.rename_concept(cid, new_id)
            self._purge_concept(cid)
            self._index_concept(concept)
            self._save()
            return concept

    def annotate_concept(self, cid: Term, labels: dict | None = None,
                         comments: dict | None = None) -> Concept:
        with self._lock:
            concept = self.manager.annotate_concept(cid, labels, comments)
            self._index_concept(concept)
            self._save()
            return concept

    def move_concept(self, cid: Term, new_parents: set[Term]) -> Concept:
        with self._lock:
            concept = self.manager.move_concept(cid, new_parents)
            self._save()
            return concept

    def delete_concept(self, cid: Term, mode: str = "refuse_if_children") -> int:
        with self._lock:
            removed = self.manager.delete_concept(cid, mode)
            self._purge_concept(cid)
            self._save()
            return removed

    # -- import / export / ingest ----------------------------------------------

    def import_rdf(self, text: str, source: str = "import") -> int:
        """Parse and merge an RDF document; returns the number of new triples."""
        with self._lock:
            triples = parse_turtle(text)
            added = TripleStore()
            for t in triples:
                if self.store.insert(t):
                    added.insert(t)
            self.log.append("Import", source, {
                "kind": "rdf",
                "added": serialize(added, "ntriples"),
                "count": len(added),
            })
            self.index = build_index(self.store, self.catalog)
            self._save()
            return len(added)

    def export(self, format: str = "ntriples") -> str:
        with self._lock:
            return serialize(self.store, format)

    def ingest(self, text: str, format: str, source: str = "ingest") -> IngestReport:
        with self._lock:
            before = {r.record_id for r in self.catalog.all_records()}
            report = ingest_text(self.catalog, self.index, text, format)
            added = [r for r in self.catalog.all_records() if r.record_id not in before]
            self._persist_records(added)
            self.log.append("Import", source, {
                "kind": "records",
                "accepted": report.accepted,
                "rejected": report.rejected,
                "record_ids": sorted(r.record_id for r in added),
            })
            return report

    # -- reads -------------------------------------------------------------------

    def get_concept(self, cid: Term) -> Concept:
        with self._lock:
            return self.manager.get_concept(cid)

    def concept_ids(self) -> list[Term]:
        with self._lock:
            return self.manager.concept_ids()

    def concept_count(self) -> int:
        with self._lock:
            return len(self.manager.concept_ids())

    def validate(self) -> ValidationReport:
        with self._lock:
            return validate(self.store, self.schema)

    def search(self, query: str, lang: str | None = None, k: int = 10) -> list[SearchHit]:
        with self._lock:
            return self.index.search(query, lang=lang, k=k)

    def suggest(self, query: str, max_distance: int = 2, k: int = 5):
        with self._lock:
            return self.index.suggest(query, max_distance=max_distance, k=k)

    def suggest_concepts(self, text: str, k: int = 5):
        with self._lock:
            return suggest_concepts(self.index, text, k=k)

    def query(self, text: str) -> dict:
        """Parse and run a query; table payload with canonical encodings."""
        with self._lock:
            q = parse_query(text)
            rows = evaluate(self.store, q)
            columns = select_order(q)
            return {
                "columns": columns,
                "rows": [[n3(binding[v]) for v in columns] for binding in rows],
            }

    def neighborhood(self, center: Term, depth: int, lang: str | None = None) -> GraphView:
        with self._lock:
            return neighborhood(self.store, center, depth,
                                lang or self.default_lang, self.schema)

    def path_to_root(self, cid: Term) -> list[list[Term]]:
        with self._lock:
            return path_to_root(self.store, cid)

    def changes(self, since_seq: int = 0) -> list[ChangeRecord]:
        with self._lock:
            return self.log.since(since_seq)

    def health(self) -> dict:
        with self._lock:
            return {"status": "ok", "concepts": self.concept_count()}
