"""Concept-level management of the class hierarchy held in a triple store.

A concept is an IRI typed as owl:Class, carrying rdfs:subClassOf links to its
parents and exactly one rdfs:label and rdfs:comment per language (English and
Portuguese). Four fixed root concepts partition the hierarchy into branches.
Every mutation appends one record to an append-only change log; replaying the
log against an empty store reproduces the store's membership.

Annotation counts are rigid by design: a validated ontology of N concepts
carries exactly 2N labels and 2N comments.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from functools import lru_cache

from .errors import (
    ConflictError,
    CycleError,
    NotFoundError,
    StorageError,
    ValidationError,
)
from .rdf_store import (
    OWL_CLASS,
    RDF_TYPE,
    RDFS_COMMENT,
    RDFS_LABEL,
    RDFS_SUBCLASSOF,
    Term,
    Triple,
    TripleStore,
    iri,
    literal,
    parse_turtle,
    serialize,
)

BASE_IRI = "http://epilepsiae.example.org/onto#"
LANGS = ("en", "pt")

_TYPE = iri(RDF_TYPE)
_SUB = iri(RDFS_SUBCLASSOF)
_LABEL = iri(RDFS_LABEL)
_COMMENT = iri(RDFS_COMMENT)
_CLASS = iri(OWL_CLASS)

CHANGE_OPS = ("Create", "Rename", "Annotate", "Move", "Delete", "Import")


@dataclass(frozen=True, slots=True)
class OntologySchema:
    """The fixed frame every managed ontology must fit: four branch roots."""

    base_iri: str = BASE_IRI
    root_locals: tuple[str, ...] = (
        "GeneralConcept",
        "SeizureType",
        "EpilepticSyndrome",
        "Electroencephalography",
    )

    @property
    def roots(self) -> tuple[Term, ...]:
        return _roots_of(self.base_iri, self.root_locals)


@lru_cache(maxsize=None)
def _roots_of(base_iri: str, root_locals: tuple[str, ...]) -> tuple[Term, ...]:
    return tuple(iri(base_iri + local) for local in root_locals)


@dataclass(frozen=True, slots=True)
class Concept:
    id: Term
    parents: tuple[Term, ...]
    labels: dict[str, str]
    comments: dict[str, str]

    def to_payload(self) -> dict:
        return {
            "id": self.id.value,
            "parents": [p.value for p in self.parents],
            "labels": dict(self.labels),
            "comments": dict(self.comments),
        }


@dataclass(frozen=True, slots=True)
class ChangeRecord:
    seq: int
    timestamp: str
    op: str
    subject: str
    detail: dict

    def to_payload(self) -> dict:
        return {
            "seq": self.seq,
            "timestamp": self.timestamp,
            "op": self.op,
            "subject": self.subject,
            "detail": self.detail,
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "ChangeRecord":
        return cls(
            seq=payload["seq"],
            timestamp=payload["timestamp"],
            op=payload["op"],
            subject=payload["subject"],
            detail=payload["detail"],
        )


class ChangeLog:
    """Append-only, gapless sequence of ChangeRecords, optionally file-backed.

    With a path, every append writes one JSON line immediately; construction
    loads whatever the file already holds so sequence numbers continue.
    """

    def __init__(self, path=None):
        self.path = path
        self.records: list[ChangeRecord] = []
        if path is not None:
            try:
                with open(path, encoding="utf-8") as fh:
                    lines = [line for line in fh if line.strip()]
            except FileNotFoundError:
                lines = []
            except OSError as exc:
                raise StorageError(f"cannot read change log: {exc}") from exc
            for i, line in enumerate(lines, start=1):
                try:
                    record = ChangeRecord.from_payload(json.loads(line))
                except (ValueError, KeyError) as exc:
                    raise StorageError(
                        f"corrupt change log line {i}: {exc}"
                    ) from exc
                if record.seq != i:
                    raise StorageError(
                        f"change log gap: expected seq {i}, found {record.seq}"
                    )
                self.records.append(record)

    def append(self, op: str, subject: str, detail: dict) -> ChangeRecord:
        if op not in CHANGE_OPS:
            raise ValidationError(f"unknown change op {op!r}")
        record = ChangeRecord(
            seq=len(self.records) + 1,
            timestamp=datetime.now(timezone.utc).isoformat(),
            op=op,
            subject=subject,
            detail=detail,
        )
        if self.path is not None:
            try:
                with open(self.path, "a", encoding="utf-8", newline="\n") as fh:
                    fh.write(json.dumps(record.to_payload(), ensure_ascii=False) + "\n")
            except OSError as exc:
                raise StorageError(f"cannot append to change log: {exc}") from exc
        self.records.append(record)
        return record

    def since(self, seq: int) -> list[ChangeRecord]:
        """Records with seq strictly greater than the given value."""
        return [r for r in self.records if r.seq > seq]


@dataclass(frozen=True, slots=True)
class Violation:
    kind: str  # cycle | roots | unreachable | annotations | dangling
    subject: str | None
    message: str

    def to_payload(self) -> dict:
        return {"kind": self.kind, "subject": self.subject, "message": self.message}


@dataclass(slots=True)
class ValidationReport:
    concepts: int = 0
    labels: int = 0
    comments: int = 0
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_payload(self) -> dict:
        return {
            "concepts": self.concepts,
            "labels": self.labels,
            "comments": self.comments,
            "violations": [v.to_payload() for v in self.violations],
        }


def _require_bilingual(mapping: dict, kind: str):
    if not isinstance(mapping, dict) or set(mapping) != set(LANGS):
        raise ValidationError(
            f"{kind} must carry exactly the languages {{en, pt}}",
            detail={"given": sorted(mapping) if isinstance(mapping, dict) else None},
        )
    for lang, value in mapping.items():
        if not isinstance(value, str) or not value.strip():
            raise ValidationError(f"empty {kind} for language {lang!r}")


class OntologyManager:
    """All concept mutations, funneled through one store and one change log.

    The caller owns locking; this class assumes it runs on the single write
    path. A manager without a log (log=None) mutates silently, which is how
    the seed generator and the replay routine reuse the same operation code.
    """

    def __init__(self, store: TripleStore, log: ChangeLog | None = None,
                 schema: OntologySchema | None = None):
        self.store = store
        self.log = log
        self.schema = schema or OntologySchema()

    # -- reads ------------------------------------------------------------

    def concept_ids(self) -> list[Term]:
        return [t.s for t in self.store.match(None, _TYPE, _CLASS)]

    def is_concept(self, cid: Term) -> bool:
        return bool(self.store.match(cid, _TYPE, _CLASS))

    def parents_of(self, cid: Term) -> list[Term]:
        return [t.o for t in self.store.match(cid, _SUB, None)]

    def children_of(self, cid: Term) -> list[Term]:
        return [t.s for t in self.store.match(None, _SUB, cid)]

    def _annotations(self, cid: Term, pred: Term) -> dict[str, str]:
        out = {}
        for t in self.store.match(cid, pred, None):
            if not t.o.is_iri:
                out[t.o.lang or ""] = t.o.value
        return out

    def get_concept(self, cid: Term) -> Concept:
        if not self.is_concept(cid):
            raise NotFoundError(f"no concept <{cid.value}>")
        return Concept(
            id=cid,
            parents=tuple(sorted(self.parents_of(cid), key=lambda t: t.value)),
            labels=self._annotations(cid, _LABEL),
            comments=self._annotations(cid, _COMMENT),
        )

    def ancestors(self, cid: Term) -> set[Term]:
        seen: set[Term] = set()
        frontier = [cid]
        while frontier:
            node = frontier.pop()
            for parent in self.parents_of(node):
                if parent not in seen:
                    seen.add(parent)
                    frontier.append(parent)
        return seen

    def descendants(self, cid: Term) -> set[Term]:
        seen: set[Term] = set()
        frontier = [cid]
        while frontier:
            node = frontier.pop()
            for child in self.children_of(node):
                if child not in seen:
                    seen.add(child)
                    frontier.append(child)
        return seen

    # -- mutations ---------------------------------------------------------

    def _record(self, op: str, subject: str, detail: dict):
        if self.log is not None:
            self.log.append(op, subject, detail)

    def create_concept(self, cid: Term, parents: set[Term],
                       labels: dict[str, str], comments: dict[str, str]) -> Concept:
        if self.is_concept(cid):
            raise ConflictError(f"concept <{cid.value}> already exists")
        parents = set(parents)
        if cid in parents:
            raise CycleError(f"<{cid.value}> cannot be its own parent")
        if not parents and cid not in self.schema.roots:
            raise ValidationError(
                f"<{cid.value}> is not a root and must have at least one parent"
            )
        if parents and cid in self.schema.roots:
            raise ValidationError(f"root <{cid.value}> cannot have parents")
        for parent in parents:
            if not self.is_concept(parent):
                raise NotFoundError(f"unknown parent <{parent.value}>")
        _require_bilingual(labels, "labels")
        _require_bilingual(comments, "comments")

        self.store.insert(Triple(cid, _TYPE, _CLASS))
        for parent in parents:
            self.store.insert(Triple(cid, _SUB, parent))
        for lang in LANGS:
            self.store.insert(Triple(cid, _LABEL, literal(labels[lang], lang)))
            self.store.insert(Triple(cid, _COMMENT, literal(comments[lang], lang)))
        concept = self.get_concept(cid)
        self._record("Create", cid.value, {"concept": concept.to_payload()})
        return concept

    def rename_concept(self, cid: Term, new_id: Term) -> Concept:
        if not self.is_concept(cid):
            raise NotFoundError(f"no concept <{cid.value}>")
        if cid in self.schema.roots:
            raise ConflictError(f"root <{cid.value}> cannot be renamed")
        if self.is_concept(new_id):
            raise ConflictError(f"concept <{new_id.value}> already exists")
        for t in self.store.match(cid, None, None):
            self.store.remove(t)
            self.store.insert(Triple(new_id, t.p, t.o))
        for t in self.store.match(None, None, cid):
            self.store.remove(t)
            self.store.insert(Triple(t.s, t.p, new_id))
        self._record("Rename", cid.value, {"before": cid.value, "after": new_id.value})
        return self.get_concept(new_id)

    def annotate_concept(self, cid: Term, labels: dict | None = None,
                         comments: dict | None = None) -> Concept:
        if labels is None and comments is None:
            raise ValidationError("nothing to annotate: provide labels or comments")
        before = self.get_concept(cid)
        for kind, mapping in (("labels", labels), ("comments", comments)):
            if mapping is not None:
                _require_bilingual(mapping, kind)
        detail: dict = {}
        for pred, kind, mapping, old in (
            (_LABEL, "labels", labels, before.labels),
            (_COMMENT, "comments", comments, before.comments),
        ):
            if mapping is None:
                continue
            for t in self.store.match(cid, pred, None):
                self.store.remove(t)
            for lang in LANGS:
                self.store.insert(Triple(cid, pred, literal(mapping[lang], lang)))
            detail[kind] = {"before": old, "after": dict(mapping)}
        self._record("Annotate", cid.value, detail)
        return self.get_concept(cid)

    def move_concept(self, cid: Term, new_parents: set[Term]) -> Concept:
        if not self.is_concept(cid):
            raise NotFoundError(f"no concept <{cid.value}>")
        if cid in self.schema.roots:
            raise ConflictError(f"root <{cid.value}> cannot be moved")
        new_parents = set(new_parents)
        if not new_parents:
            raise ValidationError(f"<{cid.value}> must keep at least one parent")
        blocked = self.descendants(cid) | {cid}
        for parent in new_parents:
            if not self.is_concept(parent):
                raise NotFoundError(f"unknown parent <{parent.value}>")
            if parent in blocked:
                raise CycleError(
                    f"moving <{cid.value}> under <{parent.value}> would create a cycle"
                )
        before = sorted(p.value for p in self.parents_of(cid))
        for t in self.store.match(cid, _SUB, None):
            self.store.remove(t)
        for parent in new_parents:
            self.store.insert(Triple(cid, _SUB, parent))
        after = sorted(p.value for p in new_parents)
        self._record("Move", cid.value, {"before": before, "after": after})
        return self.get_concept(cid)

    def delete_concept(self, cid: Term, mode: str = "refuse_if_children") -> int:
        if mode not in ("refuse_if_children", "reparent_children"):
            raise ValidationError(f"unknown delete mode {mode!r}")
        if not self.is_concept(cid):
            raise NotFoundError(f"no concept <{cid.value}>")
        if cid in self.schema.roots:
            raise ConflictError(f"root <{cid.value}> cannot be deleted")
        children = self.children_of(cid)
        if children and mode == "refuse_if_children":
            raise ConflictError(
                f"<{cid.value}> has {len(children)} child concept(s)",
                detail={"children": sorted(c.value for c in children)},
            )
        parents = self.parents_of(cid)
        before = self.get_concept(cid).to_payload()
        removed = 0
        for t in self.store.match(cid, None, None):
            removed += self.store.remove(t)
        for t in self.store.match(None, None, cid):
            removed += self.store.remove(t)
        for child in children:
            for parent in parents:
                self.store.insert(Triple(child, _SUB, parent))
        self._record(
            "Delete",
            cid.value,
            {
                "before": before,
                "mode": mode,
                "removed": removed,
                "reparented": sorted(c.value for c in children),
            },
        )
        return removed

    # -- log ----------------------------------------------------------------

    def change_log(self, since_seq: int = 0) -> list[ChangeRecord]:
        if self.log is None:
            return []
        return self.log.since(since_seq)


def _find_cycle(adjacency: dict[Term, list[Term]]) -> list[Term] | None:
    """First directed cycle in deterministic order, as a closed node path."""
    color: dict[Term, str] = {}
    for start in sorted(adjacency, key=lambda t: t.value):
        if start in color:
            continue
        path = [start]
        stack = [(start, iter(adjacency.get(start, ())))]
        color[start] = "active"
        while stack:
            node, edges = stack[-1]
            nxt = next(edges, None)
            if nxt is None:
                stack.pop()
                path.pop()
                color[node] = "done"
            elif color.get(nxt) == "active":
                return path[path.index(nxt):] + [nxt]
            elif nxt not in color:
                color[nxt] = "active"
                path.append(nxt)
                stack.append((nxt, iter(adjacency.get(nxt, ()))))
    return None


def validate(store: TripleStore, schema: OntologySchema | None = None) -> ValidationReport:
    """Full consistency audit; violations are data, never exceptions."""
    schema = schema or OntologySchema()
    report = ValidationReport()

    concepts = {t.s for t in store.match(None, _TYPE, _CLASS)}
    sub_triples = store.match(None, _SUB, None)
    report.concepts = len(concepts)
    report.labels = len(store.match(None, _LABEL, None))
    report.comments = len(store.match(None, _COMMENT, None))

    adjacency: dict[Term, list[Term]] = {}
    for t in sub_triples:
        adjacency.setdefault(t.s, []).append(t.o)
        adjacency.setdefault(t.o, [])
    for node in adjacency:
        adjacency[node].sort(key=lambda t: t.value)

    for t in sub_triples:
        for end, role in ((t.s, "subject"), (t.o, "target")):
            if end not in concepts:
                report.violations.append(Violation(
                    "dangling",
                    end.value,
                    f"subClassOf {role} <{end.value}> is not a concept",
                ))

    cycle = _find_cycle(adjacency)
    if cycle is not None:
        path = " -> ".join(f"<{n.value}>" for n in cycle)
        report.violations.append(
            Violation("cycle", cycle[0].value, f"hierarchy cycle: {path}")
        )

    parentless = {c for c in concepts if not store.match(c, _SUB, None)}
    expected_roots = set(schema.roots)
    if parentless != expected_roots:
        missing = sorted(r.value for r in expected_roots - parentless)
        extra = sorted(c.value for c in parentless - expected_roots)
        report.violations.append(Violation(
            "roots",
            None,
            f"expected exactly the four schema roots as parentless concepts; "
            f"missing={missing} extra={extra}",
        ))

    reachable = set(expected_roots & concepts)
    frontier = list(reachable)
    children: dict[Term, list[Term]] = {}
    for t in sub_triples:
        children.setdefault(t.o, []).append(t.s)
    while frontier:
        node = frontier.pop()
        for child in children.get(node, ()):
            if child not in reachable:
                reachable.add(child)
                frontier.append(child)
    for c in sorted(concepts - reachable - expected_roots, key=lambda t: t.value):
        report.violations.append(
            Violation("unreachable", c.value, f"<{c.value}> reaches no root")
        )

    for c in sorted(concepts, key=lambda t: t.value):
        for pred, kind in ((_LABEL, "label"), (_COMMENT, "comment")):
            tags = []
            for t in store.match(c, pred, None):
                tags.append(t.o.lang if not t.o.is_iri else None)
            if sorted(t for t in tags if t) != list(LANGS) or len(tags) != len(LANGS):
                report.violations.append(Violation(
                    "annotations",
                    c.value,
                    f"<{c.value}> needs exactly one en and one pt {kind}, "
                    f"found tags {sorted(str(t) for t in tags)}",
                ))

    return report


_BRANCHES = (
    ("GeneralConcept", 35, ("General concepts", "Conceitos gerais"),
     ("Common concepts of epilepsy.", "Conceitos comuns da epilepsia.")),
    ("SeizureType", 36, ("Seizures Types", "Tipos de Crises"),
     ("All kinds of seizures types.", "Todos os tipos de crises.")),
    ("EpilepticSyndrome", 35, ("Epileptic Syndromes", "Síndromes Epilépticas"),
     ("All known epileptic syndromes.", "Todas as síndromes epilépticas conhecidas.")),
    ("Electroencephalography", 35, ("Electroencephalography", "Eletroencefalografia"),
     ("All Electroencephalography related concepts.",
      "Todos os conceitos relacionados à eletroencefalografia.")),
)


def generate_seed(schema: OntologySchema | None = None) -> TripleStore:
    """The bundled starter ontology: four real branch roots, synthetic rest.

    Deterministic by construction; every concept below the roots is clearly
    synthetic (SYN- prefix) rather than invented medical terminology. Totals
    are fixed: 145 concepts, 290 labels, 290 comments.
    """
    schema = schema or OntologySchema()
    store = TripleStore()
    mgr = OntologyManager(store, log=None, schema=schema)
    for local, size, (label_en, label_pt), (comment_en, comment_pt) in _BRANCHES:
        root = iri(schema.base_iri + local)
        mgr.create_concept(
            root, set(),
            {"en": label_en, "pt": label_pt},
            {"en": comment_en, "pt": comment_pt},
        )
        members: list[Term] = []
        for i in range(size):
            cid = iri(f"{schema.base_iri}SYN-{local}-{i:03d}")
            if i < 5:
                parents = {root}
            else:
                # Fan-out 3 keeps depth moderate; the second formula adds a
                # few diamond (multi-parent) nodes without ever pointing
                # forward, so the result stays acyclic.
                parents = {members[(i - 5) // 3]}
                if i % 9 == 7:
                    parents.add(members[(i - 5) // 4])
            mgr.create_concept(
                cid,
                parents,
                {
                    "en": f"SYN {local} concept {i:03d}",
                    "pt": f"SYN conceito {i:03d} de {label_pt}",
                },
                {
                    "en": f"Synthetic placeholder {i:03d} in the {label_en} branch; "
                          "generated, not clinical terminology.",
                    "pt": f"Conceito sintético {i:03d} no ramo {label_pt}; "
                          "gerado, sem terminologia clínica.",
                },
            )
            members.append(cid)
    return store


def replay_changes(records: list[ChangeRecord],
                   schema: OntologySchema | None = None) -> TripleStore:
    """Rebuild store membership from a change log alone.

    Raises ValidationError on a sequence gap; op payloads carry everything
    needed to re-apply each mutation deterministically.
    """
    store = TripleStore()
    mgr = OntologyManager(store, log=None, schema=schema)
    for position, record in enumerate(records, start=1):
        if record.seq != position:
            raise ValidationError(
                f"change log gap at position {position}: seq {record.seq}"
            )
        detail = record.detail
        if record.op == "Import":
            if detail["kind"] == "seed":
                for t in generate_seed(schema).triples():
                    store.insert(t)
            elif detail["kind"] == "rdf":
                for t in parse_turtle(detail["added"]):
                    store.insert(t)
            # kind "records" touches the record catalog only, not the store
        elif record.op == "Create":
            payload = detail["concept"]
            mgr.create_concept(
                iri(payload["id"]),
                {iri(p) for p in payload["parents"]},
                payload["labels"],
                payload["comments"],
            )
        elif record.op == "Rename":
            mgr.rename_concept(iri(detail["before"]), iri(detail["after"]))
        elif record.op == "Annotate":
            mgr.annotate_concept(
                iri(record.subject),
                labels=detail.get("labels", {}).get("after") if "labels" in detail else None,
                comments=detail.get("comments", {}).get("after") if "comments" in detail else None,
            )
        elif record.op == "Move":
            mgr.move_concept(iri(record.subject), {iri(p) for p in detail["after"]})
        elif record.op == "Delete":
            mgr.delete_concept(iri(record.subject), detail["mode"])
        else:
            raise ValidationError(f"unknown change op {record.op!r}")
    return store


def seed_snapshot_text(schema: OntologySchema | None = None) -> str:
    """Canonical N-Triples text of the bundled seed."""
    return serialize(generate_seed(schema), "ntriples")
