"""Embedded RDF knowledge management for a bilingual epilepsy ontology.

The package bundles a triple store with Turtle and N-Triples I/O, a SPARQL
subset, consistency-enforcing ontology management with a replayable change
log, TF-IDF text search with edit-distance suggestions, graph navigation,
record ingest, and an HTTP JSON service plus CLI on top.
"""

from .errors import (
    ConflictError,
    CycleError,
    KmsError,
    NotFoundError,
    ParseError,
    StorageError,
    ValidationError,
)
from .ingest import AnnotationRecord, IngestReport, RecordCatalog, suggest_concepts
from .kms import KnowledgeBase, build_index
from .navigation import GraphEdge, GraphNode, GraphView, neighborhood, path_to_root
from .ontology_mgmt import (
    BASE_IRI,
    LANGS,
    ChangeLog,
    ChangeRecord,
    Concept,
    OntologyManager,
    OntologySchema,
    ValidationReport,
    Violation,
    generate_seed,
    replay_changes,
    validate,
)
from .rdf_store import (
    Term,
    Triple,
    TripleStore,
    iri,
    literal,
    n3,
    parse_turtle,
    serialize,
)
from .sparql_engine import evaluate, parse_query
from .text_search import DocRef, InvertedIndex, SearchHit, levenshtein, tokenize

__version__ = "0.1.0"

__all__ = [
    "AnnotationRecord",
    "BASE_IRI",
    "ChangeLog",
    "ChangeRecord",
    "Concept",
    "ConflictError",
    "CycleError",
    "DocRef",
    "GraphEdge",
    "GraphNode",
    "GraphView",
    "IngestReport",
    "InvertedIndex",
    "KmsError",
    "KnowledgeBase",
    "LANGS",
    "NotFoundError",
    "OntologyManager",
    "OntologySchema",
    "ParseError",
    "RecordCatalog",
    "SearchHit",
    "StorageError",
    "Term",
    "Triple",
    "TripleStore",
    "ValidationError",
    "ValidationReport",
    "Violation",
    "build_index",
    "evaluate",
    "generate_seed",
    "iri",
    "levenshtein",
    "literal",
    "n3",
    "neighborhood",
    "parse_query",
    "parse_turtle",
    "path_to_root",
    "replay_changes",
    "serialize",
    "suggest_concepts",
    "tokenize",
    "validate",
]
