"""Topology views of the hierarchy for explorers and breadcrumbs.

Reach is computed over subClassOf edges treated as undirected, so a view
around a concept shows parents and children alike; reported edges keep their
true child-to-parent direction. Output ordering is deterministic everywhere.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import NotFoundError, ValidationError
from .ontology_mgmt import OntologySchema
from .rdf_store import (
    OWL_CLASS,
    RDF_TYPE,
    RDFS_LABEL,
    RDFS_SUBCLASSOF,
    Term,
    TripleStore,
    iri,
)

_TYPE = iri(RDF_TYPE)
_SUB = iri(RDFS_SUBCLASSOF)
_LABEL = iri(RDFS_LABEL)
_CLASS = iri(OWL_CLASS)


@dataclass(frozen=True, slots=True)
class GraphNode:
    id: Term
    label: str
    is_root: bool
    depth: int

    def to_payload(self) -> dict:
        return {
            "id": self.id.value,
            "label": self.label,
            "is_root": self.is_root,
            "depth": self.depth,
        }


@dataclass(frozen=True, slots=True)
class GraphEdge:
    child: Term
    parent: Term

    def to_payload(self) -> dict:
        return {"child": self.child.value, "parent": self.parent.value}


@dataclass(frozen=True, slots=True)
class GraphView:
    center: Term
    nodes: tuple[GraphNode, ...]
    edges: tuple[GraphEdge, ...]

    def to_payload(self) -> dict:
        return {
            "center": self.center.value,
            "nodes": [n.to_payload() for n in self.nodes],
            "edges": [e.to_payload() for e in self.edges],
        }


def _local_name(value: str) -> str:
    return value.rsplit("#", 1)[-1].rsplit("/", 1)[-1]


def preferred_label(store: TripleStore, node: Term, lang: str) -> str:
    """Label in the requested language, falling back to the other language
    and finally to the IRI's local name."""
    by_lang = {}
    for t in store.match(node, _LABEL, None):
        if not t.o.is_iri and t.o.lang:
            by_lang.setdefault(t.o.lang, t.o.value)
    for candidate in (lang, "en", "pt"):
        if candidate in by_lang:
            return by_lang[candidate]
    return _local_name(node.value)


def neighborhood(store: TripleStore, center: Term, depth: int, lang: str = "en",
                 schema: OntologySchema | None = None) -> GraphView:
    """BFS ball of the given radius around a concept."""
    schema = schema or OntologySchema()
    if depth < 0:
        raise ValidationError("depth must be >= 0")
    if not store.match(center, _TYPE, _CLASS):
        raise NotFoundError(f"no concept <{center.value}>")

    neighbors: dict[Term, set[Term]] = {}
    for t in store.match(None, _SUB, None):
        neighbors.setdefault(t.s, set()).add(t.o)
        neighbors.setdefault(t.o, set()).add(t.s)

    distance = {center: 0}
    queue = deque([center])
    while queue:
        node = queue.popleft()
        if distance[node] == depth:
            continue
        for nb in sorted(neighbors.get(node, ()), key=lambda t: t.value):
            if nb not in distance:
                distance[nb] = distance[node] + 1
                queue.append(nb)

    roots = set(schema.roots)
    nodes = tuple(
        GraphNode(
            id=node,
            label=preferred_label(store, node, lang),
            is_root=node in roots,
            depth=d,
        )
        for node, d in sorted(distance.items(), key=lambda kv: (kv[1], kv[0].value))
    )
    edges = tuple(
        GraphEdge(t.s, t.o)
        for t in store.match(None, _SUB, None)
        if t.s in distance and t.o in distance
    )
    edges = tuple(sorted(edges, key=lambda e: (e.child.value, e.parent.value)))
    return GraphView(center=center, nodes=nodes, edges=edges)


def path_to_root(store: TripleStore, cid: Term) -> list[list[Term]]:
    """Every simple parent-chain from the concept up to a parentless node,
    in lexicographic order."""
    if not store.match(cid, _TYPE, _CLASS):
        raise NotFoundError(f"no concept <{cid.value}>")

    paths: list[list[Term]] = []

    def walk(node: Term, path: list[Term]):
        parents = sorted((t.o for t in store.match(node, _SUB, None)),
                         key=lambda t: t.value)
        if not parents:
            paths.append(list(path))
            return
        for parent in parents:
            if parent not in path:  # cycle guard for malformed data
                path.append(parent)
                walk(parent, path)
                path.pop()

    walk(cid, [cid])
    paths.sort(key=lambda p: [n.value for n in p])
    return paths
