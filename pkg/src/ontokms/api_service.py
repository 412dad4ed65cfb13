"""HTTP JSON service over a KnowledgeBase.

Responses wrap payloads as ``{"data": ...}``; failures become
``{"error": {"code", "message", "detail"}}`` with a fixed status mapping
(NotFound 404, Conflict/Cycle 409, Parse/Validation 422, Io 500). Export is
the one raw endpoint, answering with the RDF media type itself.

Concept ids in paths may be full IRIs (URL-encoded as needed) or bare local
names, which resolve against the configured base IRI.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.encoders import jsonable_encoder
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .errors import KmsError, StorageError, ValidationError
from .kms import KnowledgeBase
from .rdf_store import Term, iri

STATUS_BY_CODE = {
    "NotFound": 404,
    "Conflict": 409,
    "Cycle": 409,
    "Parse": 422,
    "Validation": 422,
    "Io": 500,
}

EXPORT_MEDIA_TYPES = {
    "ntriples": "application/n-triples",
    "turtle": "text/turtle",
}


class ConceptIn(BaseModel):
    id: str
    parents: list[str]
    labels: dict[str, str]
    comments: dict[str, str]


class ConceptPatch(BaseModel):
    id: str | None = None
    parents: list[str] | None = None
    labels: dict[str, str] | None = None
    comments: dict[str, str] | None = None


class DocumentIn(BaseModel):
    content: str | None = None
    path: str | None = None
    format: str | None = None
    source: str | None = None


def _error_response(code: str, message: str, detail=None) -> JSONResponse:
    return JSONResponse(
        status_code=STATUS_BY_CODE[code],
        content={"error": {"code": code, "message": message,
                           "detail": jsonable_encoder(detail)}},
    )


def _data(payload, status_code: int = 200) -> JSONResponse:
    return JSONResponse(status_code=status_code, content={"data": payload})


def _read_document(body: DocumentIn) -> str:
    if (body.content is None) == (body.path is None):
        raise ValidationError("provide exactly one of 'content' or 'path'")
    if body.content is not None:
        return body.content
    try:
        return Path(body.path).read_text(encoding="utf-8")
    except OSError as exc:
        raise StorageError(f"cannot read {body.path}: {exc}") from exc


def create_app(kb: KnowledgeBase, ui_dir=None) -> FastAPI:
    app = FastAPI(title="ontokms", docs_url=None, redoc_url=None)

    def concept_term(value: str) -> Term:
        if "://" not in value:
            value = kb.schema.base_iri + value
        return iri(value)

    @app.exception_handler(KmsError)
    async def domain_error(request: Request, exc: KmsError):
        return _error_response(exc.code, exc.message, exc.detail)

    @app.exception_handler(RequestValidationError)
    async def body_error(request: Request, exc: RequestValidationError):
        return _error_response("Validation", "invalid request", exc.errors())

    @app.get("/health")
    def health():
        return _data(kb.health())

    @app.get("/validate")
    def validate_endpoint():
        return _data(kb.validate().to_payload())

    @app.get("/search")
    def search(q: str, lang: str | None = None, k: int = 10):
        hits = kb.search(q, lang=lang, k=k)
        return _data({"hits": [h.to_payload() for h in hits]})

    @app.get("/suggest")
    def suggest(q: str, max_distance: int = 2, k: int = 5):
        suggestions = kb.suggest(q, max_distance=max_distance, k=k)
        return _data({
            "suggestions": {
                token: [{"token": word, "distance": distance}
                        for word, distance in candidates]
                for token, candidates in suggestions.items()
            }
        })

    @app.get("/suggest_concepts")
    def suggest_concepts_endpoint(text: str, k: int = 5):
        ranked = kb.suggest_concepts(text, k=k)
        return _data({
            "concepts": [{"id": concept, "score": score} for concept, score in ranked]
        })

    @app.post("/query")
    async def query(request: Request):
        raw = await request.body()
        try:
            parsed = json.loads(raw)
        except ValueError:
            parsed = None
        if isinstance(parsed, dict) and "query" in parsed:
            text = parsed["query"]
            if not isinstance(text, str):
                raise ValidationError("'query' must be a string")
        else:
            text = raw.decode("utf-8", errors="replace")
        if not text.strip():
            raise ValidationError("empty query")
        return _data(kb.query(text))

    @app.get("/changes")
    def changes(since: int = 0):
        return _data({"changes": [r.to_payload() for r in kb.changes(since)]})

    @app.get("/export")
    def export(format: str = "ntriples"):
        if format not in EXPORT_MEDIA_TYPES:
            raise ValidationError(f"unknown export format {format!r}")
        return Response(kb.export(format), media_type=EXPORT_MEDIA_TYPES[format])

    @app.post("/import")
    def import_rdf(body: DocumentIn):
        text = _read_document(body)
        source = body.source or (body.path or "import")
        added = kb.import_rdf(text, source=source)
        return _data({"added": added})

    @app.post("/ingest")
    def ingest(body: DocumentIn):
        text = _read_document(body)
        format = body.format or (Path(body.path).suffix.lstrip(".") if body.path else "jsonl")
        source = body.source or (body.path or "ingest")
        report = kb.ingest(text, format, source=source)
        return _data(report.to_payload())

    @app.post("/concepts", status_code=201)
    def create_concept(body: ConceptIn):
        concept = kb.create_concept(
            concept_term(body.id),
            {concept_term(p) for p in body.parents},
            body.labels,
            body.comments,
        )
        return _data(concept.to_payload(), status_code=201)

    @app.get("/concepts/{cid:path}/neighborhood")
    def concept_neighborhood(cid: str, depth: int = 1, lang: str | None = None):
        view = kb.neighborhood(concept_term(cid), depth, lang)
        return _data(view.to_payload())

    @app.get("/concepts/{cid:path}/paths")
    def concept_paths(cid: str):
        paths = kb.path_to_root(concept_term(cid))
        return _data({"paths": [[node.value for node in path] for path in paths]})

    @app.get("/concepts/{cid:path}")
    def get_concept(cid: str):
        return _data(kb.get_concept(concept_term(cid)).to_payload())

    @app.patch("/concepts/{cid:path}")
    def patch_concept(cid: str, body: ConceptPatch):
        term = concept_term(cid)
        wants_rename = body.id is not None
        wants_move = body.parents is not None
        wants_annotate = body.labels is not None or body.comments is not None
        if sum((wants_rename, wants_move, wants_annotate)) != 1:
            raise ValidationError(
                "one change kind per request: rename (id), move (parents), "
                "or annotate (labels/comments)"
            )
        if wants_rename:
            concept = kb.rename_concept(term, concept_term(body.id))
        elif wants_move:
            concept = kb.move_concept(term, {concept_term(p) for p in body.parents})
        else:
            concept = kb.annotate_concept(term, labels=body.labels, comments=body.comments)
        return _data(concept.to_payload())

    @app.delete("/concepts/{cid:path}")
    def delete_concept(cid: str, mode: str = "refuse_if_children"):
        removed = kb.delete_concept(concept_term(cid), mode)
        return _data({"removed": removed})

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
