"""Command line front end.

Exit codes: 0 success, 1 domain error, 2 usage error. Flags can be supplied
through the environment with the ``ONTOKMS_`` prefix (``ONTOKMS_PORT``,
``ONTOKMS_DATA_DIR``, ``ONTOKMS_BASE_IRI``, ``ONTOKMS_DEFAULT_LANG``);
explicit flags win over the environment.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .errors import KmsError, StorageError
from .kms import KnowledgeBase
from .ontology_mgmt import OntologySchema

_INGEST_FORMATS = ("jsonl", "csv")
_EXPORT_FORMATS = ("ntriples", "turtle")


def _env(name: str, fallback):
    return os.environ.get("ONTOKMS_" + name, fallback)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ontokms",
        description="Ontology knowledge management service and tools.",
    )
    parser.add_argument("--data-dir", default=_env("DATA_DIR", "data"),
                        help="directory holding store.nt, changes.jsonl, records.jsonl")
    parser.add_argument("--base-iri", default=_env("BASE_IRI", None),
                        help="base IRI for concept identifiers")
    parser.add_argument("--default-lang", default=_env("DEFAULT_LANG", "en"),
                        choices=("en", "pt"), help="language used when none is requested")

    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--port", type=int, default=int(_env("PORT", "8080")))
    serve.add_argument("--seed", action="store_true",
                       help="install the bundled ontology if the store is empty")
    serve.add_argument("--ui-dir", default=None,
                       help="serve static files from this directory under /ui")

    sub.add_parser("seed", help="install the bundled ontology into an empty store")

    import_cmd = sub.add_parser("import", help="import RDF from a file")
    import_cmd.add_argument("file")

    export_cmd = sub.add_parser("export", help="export the store to a file ('-' for stdout)")
    export_cmd.add_argument("file")
    export_cmd.add_argument("--format", default="ntriples", choices=_EXPORT_FORMATS)

    sub.add_parser("validate", help="check consistency and print violations")

    search_cmd = sub.add_parser("search", help="full-text search over the index")
    search_cmd.add_argument("q")
    search_cmd.add_argument("--lang", default=None, choices=("en", "pt"))
    search_cmd.add_argument("-k", type=int, default=10)

    query_cmd = sub.add_parser("query", help="run a SPARQL query from a file ('-' for stdin)")
    query_cmd.add_argument("file")

    ingest_cmd = sub.add_parser("ingest", help="ingest annotation records from a file")
    ingest_cmd.add_argument("file")
    ingest_cmd.add_argument("--format", default=None, choices=_INGEST_FORMATS,
                            help="defaults to the file extension")

    changes_cmd = sub.add_parser("changes", help="print change records as JSON lines")
    changes_cmd.add_argument("--since", type=int, default=0,
                             help="only records with seq greater than this")

    return parser


def _open_kb(args) -> KnowledgeBase:
    schema = OntologySchema(base_iri=args.base_iri) if args.base_iri else None
    return KnowledgeBase(args.data_dir, schema=schema, default_lang=args.default_lang)


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise StorageError(f"cannot read {path}: {exc}") from exc


def _cmd_serve(args) -> int:
    import uvicorn

    from .api_service import create_app

    kb = _open_kb(args)
    if args.seed and not kb.concept_count():
        kb.seed()
    app = create_app(kb, ui_dir=args.ui_dir)
    try:
        uvicorn.run(app, host="127.0.0.1", port=args.port, log_level="warning")
    except OSError as exc:
        print(f"error: cannot bind port {args.port}: {exc}", file=sys.stderr)
        return 1
    return 0


def _cmd_seed(args) -> int:
    kb = _open_kb(args)
    kb.seed()
    print(f"seeded {kb.concept_count()} concepts into {args.data_dir}")
    return 0


def _cmd_import(args) -> int:
    kb = _open_kb(args)
    added = kb.import_rdf(_read_input(args.file), source=args.file)
    print(f"imported {added} triples")
    return 0


def _cmd_export(args) -> int:
    kb = _open_kb(args)
    text = kb.export(args.format)
    if args.file == "-":
        sys.stdout.write(text)
    else:
        try:
            Path(args.file).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise StorageError(f"cannot write {args.file}: {exc}") from exc
        print(f"wrote {args.file}")
    return 0


def _cmd_validate(args) -> int:
    report = _open_kb(args).validate()
    print(f"concepts={report.concepts} labels={report.labels} comments={report.comments}")
    print(f"{len(report.violations)} violations")
    for v in report.violations:
        print(f"  [{v.kind}] {v.subject}: {v.message}")
    return 0


def _cmd_search(args) -> int:
    kb = _open_kb(args)
    hits = kb.search(args.q, lang=args.lang, k=args.k)
    if hits:
        for hit in hits:
            doc = hit.doc
            lang = doc.lang or "-"
            print(f"{hit.score:.4f}\t{doc.kind}\t{doc.owner}\t{lang}\t{hit.snippet}")
        return 0
    print("no results")
    print("did you mean:")
    suggestions = kb.suggest(args.q)
    for token in sorted(suggestions):
        candidates = suggestions[token]
        if candidates:
            rendered = ", ".join(f"{word} ({distance})" for word, distance in candidates)
        else:
            rendered = "(no suggestions)"
        print(f"  {token}: {rendered}")
    return 0


def _cmd_query(args) -> int:
    kb = _open_kb(args)
    result = kb.query(_read_input(args.file))
    print("\t".join(result["columns"]))
    for row in result["rows"]:
        print("\t".join(row))
    return 0


def _cmd_ingest(args) -> int:
    format = args.format or Path(args.file).suffix.lstrip(".").lower()
    kb = _open_kb(args)
    report = kb.ingest(_read_input(args.file), format, source=args.file)
    print(f"accepted {report.accepted}, rejected {report.rejected}")
    for reason in report.reasons:
        print(f"  {reason}")
    return 0


def _cmd_changes(args) -> int:
    kb = _open_kb(args)
    for record in kb.changes(args.since):
        print(json.dumps(record.to_payload(), ensure_ascii=False))
    return 0


_COMMANDS = {
    "serve": _cmd_serve,
    "seed": _cmd_seed,
    "import": _cmd_import,
    "export": _cmd_export,
    "validate": _cmd_validate,
    "search": _cmd_search,
    "query": _cmd_query,
    "ingest": _cmd_ingest,
    "changes": _cmd_changes,
}


def cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        return _COMMANDS[args.command](args)
    except KmsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(cli(sys.argv[1:]))
