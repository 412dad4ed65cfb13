"""In-memory RDF triple store with Turtle / N-Triples reading and writing.

The store keeps every triple in three sorted indexes (subject-first,
predicate-first, object-first) so that any bound/unbound match pattern can
be answered with a prefix scan. Terms are immutable values; two terms are
equal iff kind, value and language tag are all equal.

Supported concrete syntaxes are a Turtle subset (directives, prefixed
names, ``a``, ``;``/``,`` lists, language-tagged strings, comments) and
N-Triples, which this grammar contains. Blank nodes are rejected.
"""

from __future__ import annotations

import re
from bisect import bisect_left, insort
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator

from .errors import ParseError, StorageError, ValidationError

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"
OWL_NS = "http://www.w3.org/2002/07/owl#"
XSD_NS = "http://www.w3.org/2001/XMLSchema#"

RDF_TYPE = RDF_NS + "type"
RDFS_SUBCLASSOF = RDFS_NS + "subClassOf"
RDFS_LABEL = RDFS_NS + "label"
RDFS_COMMENT = RDFS_NS + "comment"
OWL_CLASS = OWL_NS + "Class"

#: Prefixes used when writing Turtle (only the ones actually needed are emitted).
DEFAULT_PREFIXES = {"rdf": RDF_NS, "rdfs": RDFS_NS, "owl": OWL_NS, "xsd": XSD_NS}

_LANG_RE = re.compile(r"^[a-z]{2}(-[a-z0-9]{2,8})*$")
_SCHEME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")
# Whitespace/control characters plus the characters an IRIREF cannot carry
# unescaped; keeps <...> serialization re-parsable.
_BAD_IRI_CHAR_RE = re.compile(r'[\x00-\x20<>"{}|^`\\]')


class TermKind(Enum):
    IRI = "iri"
    LITERAL = "literal"


@dataclass(frozen=True, slots=True)
class Term:
    """An RDF node: an IRI or a (possibly language-tagged) literal."""

    kind: TermKind
    value: str
    lang: str | None = None

    def __post_init__(self):
        if self.kind is TermKind.IRI:
            if not self.value:
                raise ValidationError("IRI must be non-empty")
            bad = _BAD_IRI_CHAR_RE.search(self.value)
            if bad:
                raise ValidationError(
                    f"IRI contains forbidden character {bad.group()!r}: {self.value!r}"
                )
            if self.lang is not None:
                raise ValidationError("IRIs cannot carry a language tag")
        elif self.lang is not None and not _LANG_RE.match(self.lang):
            raise ValidationError(f"malformed language tag: {self.lang!r}")

    @property
    def is_iri(self) -> bool:
        return self.kind is TermKind.IRI

    def __repr__(self) -> str:
        return n3(self)


def iri(value: str) -> Term:
    return Term(TermKind.IRI, value)


def literal(value: str, lang: str | None = None) -> Term:
    return Term(TermKind.LITERAL, value, lang)


@dataclass(frozen=True, slots=True)
class Triple:
    """A single (subject, predicate, object) statement."""

    s: Term
    p: Term
    o: Term

    def __post_init__(self):
        if not self.s.is_iri:
            raise ValidationError(f"triple subject must be an IRI, got {self.s!r}")
        if not self.p.is_iri:
            raise ValidationError(f"triple predicate must be an IRI, got {self.p!r}")

    def __repr__(self) -> str:
        return f"{n3(self.s)} {n3(self.p)} {n3(self.o)} ."


def _escape(text: str) -> str:
    out = []
    for ch in text:
        if ch == "\\":
            out.append("\\\\")
        elif ch == '"':
            out.append('\\"')
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\r":
            out.append("\\r")
        elif ch == "\t":
            out.append("\\t")
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "".join(out)


def n3(term: Term) -> str:
    """Canonical N-Triples encoding of a term; code-point order over these
    strings defines every sort in the system."""
    if term.is_iri:
        return f"<{term.value}>"
    enc = f'"{_escape(term.value)}"'
    if term.lang:
        enc += f"@{term.lang}"
    return enc


def _triple_key(t: Triple) -> tuple[str, str, str]:
    return (n3(t.s), n3(t.p), n3(t.o))


class TripleStore:
    """Triple set indexed three ways (spo, pos, osp) for prefix matching.

    All mutations go through :meth:`insert` / :meth:`remove`, which keep the
    indexes in lockstep and bump ``generation`` on every successful change.
    Reads never mutate; the single-writer / multiple-reader contract is the
    caller's (see ``KnowledgeBase``).
    """

    __slots__ = ("_by_key", "_spo", "_pos", "_osp", "_generation")

    def __init__(self, triples: Iterable[Triple] = ()):
        self._by_key: dict[tuple[str, str, str], Triple] = {}
        self._spo: list[tuple[str, str, str]] = []
        self._pos: list[tuple[str, str, str]] = []
        self._osp: list[tuple[str, str, str]] = []
        self._generation = 0
        for t in triples:
            self.insert(t)

    @property
    def generation(self) -> int:
        return self._generation

    def __len__(self) -> int:
        return len(self._by_key)

    def __iter__(self) -> Iterator[Triple]:
        for key in self._spo:
            yield self._by_key[key]

    def __contains__(self, t: Triple) -> bool:
        return _triple_key(t) in self._by_key

    def __eq__(self, other) -> bool:
        """Membership equality; generation counters are not compared."""
        if not isinstance(other, TripleStore):
            return NotImplemented
        return self._by_key.keys() == other._by_key.keys()

    def insert(self, t: Triple) -> bool:
        """Add ``t``; returns False (store untouched) if already present."""
        if not isinstance(t, Triple):
            raise ValidationError(f"not a triple: {t!r}")
        key = _triple_key(t)
        if key in self._by_key:
            return False
        es, ep, eo = key
        self._by_key[key] = t
        insort(self._spo, (es, ep, eo))
        insort(self._pos, (ep, eo, es))
        insort(self._osp, (eo, es, ep))
        self._generation += 1
        return True

    def remove(self, t: Triple) -> bool:
        """Remove ``t``; returns False if it was not present."""
        key = _triple_key(t)
        if key not in self._by_key:
            return False
        es, ep, eo = key
        del self._by_key[key]
        for lst, entry in (
            (self._spo, (es, ep, eo)),
            (self._pos, (ep, eo, es)),
            (self._osp, (eo, es, ep)),
        ):
            i = bisect_left(lst, entry)
            del lst[i]
        self._generation += 1
        return True

    def match(
        self, s: Term | None = None, p: Term | None = None, o: Term | None = None
    ) -> list[Triple]:
        """All triples matching the bound positions, in index order.

        The index is chosen by the first bound position (s -> spo, else
        p -> pos, else o -> osp, none bound -> spo); bound positions not
        covered by the index prefix are filtered afterwards.
        """
        es = n3(s) if s is not None else None
        ep = n3(p) if p is not None else None
        eo = n3(o) if o is not None else None

        if es is not None:
            lst, order = self._spo, (es, ep, eo)
        elif ep is not None:
            lst, order = self._pos, (ep, eo, es)
        elif eo is not None:
            lst, order = self._osp, (eo, es, ep)
        else:
            lst, order = self._spo, (None, None, None)

        prefix: list[str] = []
        for part in order:
            if part is None:
                break
            prefix.append(part)
        rest = order[len(prefix):]

        if prefix:
            lo = bisect_left(lst, tuple(prefix))
            hi = bisect_left(lst, tuple(prefix[:-1]) + (prefix[-1] + "\x00",))
            entries = lst[lo:hi]
        else:
            entries = lst[:]

        out = []
        for entry in entries:
            suffix = entry[len(prefix):]
            if any(want is not None and got != want for want, got in zip(rest, suffix)):
                continue
            if lst is self._spo:
                key = entry
            elif lst is self._pos:
                key = (entry[2], entry[0], entry[1])
            else:
                key = (entry[1], entry[2], entry[0])
            out.append(self._by_key[key])
        return out

    def triples(self) -> list[Triple]:
        """All triples in canonical (s, p, o) order."""
        return [self._by_key[k] for k in self._spo]


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_PNAME_CHARS = set("_-.:")


class _Lexer:
    """Hand-written scanner for the Turtle subset; tracks 1-based positions."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def error(self, message: str, line: int | None = None, col: int | None = None):
        raise ParseError(message, line or self.line, col or self.col)

    def _advance(self, n: int = 1):
        for _ in range(n):
            if self.pos < len(self.text):
                if self.text[self.pos] == "\n":
                    self.line += 1
                    self.col = 1
                else:
                    self.col += 1
                self.pos += 1

    def _peek(self, offset: int = 0) -> str:
        i = self.pos + offset
        return self.text[i] if i < len(self.text) else ""

    def _skip_ws(self):
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch == "#":
                while self.pos < len(self.text) and self.text[self.pos] != "\n":
                    self._advance()
            elif ch.isspace():
                self._advance()
            else:
                return

    def tokens(self) -> list[tuple[str, object, int, int]]:
        toks = []
        while True:
            self._skip_ws()
            line, col = self.line, self.col
            ch = self._peek()
            if not ch:
                toks.append(("eof", None, line, col))
                return toks
            if ch == "<":
                toks.append(("iriref", self._read_iriref(), line, col))
            elif ch == '"':
                toks.append(("string", self._read_string(), line, col))
            elif ch == "@":
                self._advance()
                word = self._read_while(lambda c: c.isalnum() or c == "-")
                if not word:
                    self.error("dangling '@'", line, col)
                toks.append(("at", word, line, col))
            elif ch in ".;,":
                self._advance()
                toks.append((ch, None, line, col))
            elif ch == "^":
                if self._peek(1) != "^":
                    self.error("expected '^^'", line, col)
                self._advance(2)
                toks.append(("^^", None, line, col))
            elif ch == "_" and self._peek(1) == ":":
                self.error("blank nodes are not supported", line, col)
            elif ch in "[](){}":
                self.error(f"unsupported syntax {ch!r}", line, col)
            elif ch.isdigit() or ch in "+-":
                self.error("numeric literals are not supported", line, col)
            elif ch == "'":
                self.error("single-quoted strings are not supported", line, col)
            elif ch.isalpha() or ch == "_" or ch == ":":
                word = self._read_while(lambda c: c.isalnum() or c in _PNAME_CHARS)
                # A trailing dot terminates the statement, it is not part of
                # the local name.
                while word.endswith("."):
                    word = word[:-1]
                    self.pos -= 1
                    self.col -= 1
                if word == "a":
                    toks.append(("a", None, line, col))
                elif ":" in word:
                    prefix, local = word.split(":", 1)
                    toks.append(("pname", (prefix, local), line, col))
                else:
                    self.error(f"malformed token {word!r} (expected prefixed name)", line, col)
            else:
                self.error(f"unexpected character {ch!r}", line, col)

    def _read_while(self, pred) -> str:
        start = self.pos
        while self.pos < len(self.text) and pred(self.text[self.pos]):
            self._advance()
        return self.text[start:self.pos]

    def _read_iriref(self) -> str:
        line, col = self.line, self.col
        self._advance()  # consume '<'
        out = []
        while True:
            ch = self._peek()
            if not ch or ch == "\n":
                self.error("unterminated IRI", line, col)
            if ch == ">":
                self._advance()
                return "".join(out)
            if ch == "\\":
                out.append(self._read_uchar())
            else:
                if ch == "<" or ch == '"' or ord(ch) <= 0x20:
                    self.error(f"illegal character {ch!r} in IRI")
                self._advance()
                out.append(ch)

    def _read_uchar(self) -> str:
        line, col = self.line, self.col
        self._advance()  # consume '\'
        kind = self._peek()
        if kind not in ("u", "U"):
            self.error(f"illegal escape '\\{kind}' in IRI", line, col)
        self._advance()
        width = 4 if kind == "u" else 8
        digits = ""
        for _ in range(width):
            ch = self._peek()
            if ch not in "0123456789abcdefABCDEF":
                self.error("malformed unicode escape", line, col)
            digits += ch
            self._advance()
        return chr(int(digits, 16))

    def _read_string(self) -> str:
        line, col = self.line, self.col
        if self.text[self.pos:self.pos + 3] == '"""':
            self.error("long (triple-quoted) strings are not supported", line, col)
        self._advance()  # consume '"'
        out = []
        while True:
            ch = self._peek()
            if not ch or ch == "\n":
                self.error("unterminated string literal", line, col)
            if ch == '"':
                self._advance()
                return "".join(out)
            if ch == "\\":
                nxt = self._peek(1)
                simple = {"t": "\t", "b": "\b", "n": "\n", "r": "\r",
                          "f": "\f", '"': '"', "'": "'", "\\": "\\"}
                if nxt in simple:
                    out.append(simple[nxt])
                    self._advance(2)
                elif nxt in ("u", "U"):
                    out.append(self._read_uchar())
                else:
                    self.error(f"illegal escape '\\{nxt}'")
            else:
                self._advance()
                out.append(ch)


def _resolve_iri(base: str | None, ref: str, lexer_pos: tuple[int, int]) -> str:
    """Resolve ``ref`` against ``base``.

    Deliberately simple: absolute references pass through; ``#frag`` replaces
    the base fragment; otherwise the reference is joined at the base's last
    path segment (or appended when the base ends in '/' or '#').
    """
    if _SCHEME_RE.match(ref):
        return ref
    if base is None:
        raise ParseError(f"relative IRI {ref!r} without a base", *lexer_pos)
    if ref == "":
        return base
    if ref.startswith("#"):
        return base.split("#")[0] + ref
    if base.endswith(("/", "#")):
        return base + ref
    cut = base.rfind("/")
    scheme_end = base.find("://")
    if cut > (scheme_end + 2 if scheme_end >= 0 else -1):
        return base[:cut + 1] + ref
    return base + "/" + ref


class _Parser:
    def __init__(self, text: str, base: str | None):
        self.toks = _Lexer(text).tokens()
        self.i = 0
        self.base = base
        self.prefixes: dict[str, str] = {}

    def _peek(self):
        return self.toks[self.i]

    def _next(self):
        tok = self.toks[self.i]
        if tok[0] != "eof":
            self.i += 1
        return tok

    def _expect(self, kind: str):
        tok = self._next()
        if tok[0] != kind:
            raise ParseError(f"expected {kind!r}, got {tok[0]!r}", tok[2], tok[3])
        return tok

    def parse(self) -> list[Triple]:
        out: list[Triple] = []
        while True:
            tok = self._peek()
            if tok[0] == "eof":
                return out
            if tok[0] == "at":
                self._directive()
            else:
                out.extend(self._triples())

    def _directive(self):
        kind, word, line, col = self._next()
        if word == "prefix":
            tok = self._next()
            if tok[0] != "pname" or tok[1][1] != "":
                raise ParseError("expected prefix name ending in ':'", tok[2], tok[3])
            prefix = tok[1][0]
            iri_tok = self._expect("iriref")
            value = _resolve_iri(self.base, iri_tok[1], (iri_tok[2], iri_tok[3]))
            self._term_from_iri(value, iri_tok)  # validate
            self.prefixes[prefix] = value
            self._expect(".")
        elif word == "base":
            iri_tok = self._expect("iriref")
            self.base = _resolve_iri(self.base, iri_tok[1], (iri_tok[2], iri_tok[3]))
            self._expect(".")
        else:
            raise ParseError(f"unknown directive '@{word}'", line, col)

    def _triples(self) -> list[Triple]:
        out = []
        subject = self._iri_term()
        while True:
            predicate = self._verb()
            while True:
                obj = self._object()
                out.append(Triple(subject, predicate, obj))
                if self._peek()[0] == ",":
                    self._next()
                    continue
                break
            saw_semicolon = False
            while self._peek()[0] == ";":
                self._next()
                saw_semicolon = True
            if saw_semicolon and self._peek()[0] not in (".", "eof"):
                continue  # another predicate follows; trailing ';' falls out
            break
        self._expect(".")
        return out

    def _verb(self) -> Term:
        if self._peek()[0] == "a":
            self._next()
            return iri(RDF_TYPE)
        return self._iri_term()

    def _iri_term(self) -> Term:
        tok = self._next()
        if tok[0] == "iriref":
            value = _resolve_iri(self.base, tok[1], (tok[2], tok[3]))
            return self._term_from_iri(value, tok)
        if tok[0] == "pname":
            prefix, local = tok[1]
            if prefix not in self.prefixes:
                raise ParseError(f"unknown prefix {prefix!r}", tok[2], tok[3])
            return self._term_from_iri(self.prefixes[prefix] + local, tok)
        raise ParseError(f"expected IRI, got {tok[0]!r}", tok[2], tok[3])

    @staticmethod
    def _term_from_iri(value: str, tok) -> Term:
        try:
            return iri(value)
        except ValidationError as exc:
            raise ParseError(str(exc), tok[2], tok[3]) from None

    def _object(self) -> Term:
        tok = self._peek()
        if tok[0] == "string":
            self._next()
            value = tok[1]
            nxt = self._peek()
            if nxt[0] == "at":
                self._next()
                tag = nxt[1].lower()
                if not _LANG_RE.match(tag):
                    raise ParseError(f"malformed language tag {nxt[1]!r}", nxt[2], nxt[3])
                return literal(value, tag)
            if nxt[0] == "^^":
                # Datatyped literals are tolerated on input; the datatype is
                # folded into the plain value space and never written back.
                self._next()
                dtype = self._iri_term()
                return literal(f"{value}^^<{dtype.value}>")
            return literal(value)
        return self._iri_term()


def parse_turtle(text: str, base: str | None = None) -> list[Triple]:
    """Parse a Turtle (or N-Triples) document into triples in document order.

    Raises :class:`ParseError` with line/column on the first syntax error;
    nothing is returned partially.
    """
    return _Parser(text, base).parse()


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

_SAFE_LOCAL_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_\-]*$")


def serialize(store: TripleStore, format: str = "ntriples",
              prefixes: dict[str, str] | None = None) -> str:
    """Serialize the store; output is byte-stable for a given membership.

    N-Triples: one line per triple, sorted by canonical (s, p, o) encoding.
    Turtle: grouped by subject with ``;`` / ``,`` lists, subjects and
    predicates in canonical order, declaring only the prefixes it uses.
    """
    if format == "ntriples":
        return "".join(f"{k[0]} {k[1]} {k[2]} .\n" for k in store._spo)
    if format != "turtle":
        raise ValidationError(f"unknown serialization format {format!r}")

    table = dict(DEFAULT_PREFIXES if prefixes is None else prefixes)
    by_len = sorted(table.items(), key=lambda kv: -len(kv[1]))
    used: set[str] = set()

    def render(term: Term) -> str:
        if not term.is_iri:
            return n3(term)
        for prefix, ns in by_len:
            if term.value.startswith(ns):
                local = term.value[len(ns):]
                if _SAFE_LOCAL_RE.match(local):
                    used.add(prefix)
                    return f"{prefix}:{local}"
        return n3(term)

    blocks = []
    by_subject: dict[str, list[Triple]] = {}
    for key in store._spo:
        by_subject.setdefault(key[0], []).append(store._by_key[key])
    for _, group in sorted(by_subject.items()):
        lines = []
        subj = render(group[0].s)
        by_pred: dict[str, list[Triple]] = {}
        for t in group:
            by_pred.setdefault(n3(t.p), []).append(t)
        for _, pgroup in sorted(by_pred.items()):
            pred = pgroup[0].p
            verb = "a" if pred.value == RDF_TYPE else render(pred)
            objs = " , ".join(render(t.o) for t in pgroup)
            lines.append(f"{verb} {objs}")
        blocks.append(f"{subj} " + " ;\n    ".join(lines) + " .\n")

    header = "".join(
        f"@prefix {p}: <{table[p]}> .\n" for p in sorted(used)
    )
    if header and blocks:
        return header + "\n" + "\n".join(blocks)
    return header + "\n".join(blocks)


def save_snapshot(store: TripleStore, path) -> None:
    """Write the sorted N-Triples snapshot (UTF-8, LF line endings)."""
    data = serialize(store, "ntriples")
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(data)
    except OSError as exc:
        raise StorageError(f"cannot write snapshot {path}: {exc}") from exc


def load_snapshot(path) -> TripleStore:
    """Load a snapshot written by :func:`save_snapshot`.

    A corrupt snapshot raises :class:`ParseError` and no partial store is
    produced; a missing or unreadable file raises :class:`StorageError`.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise StorageError(f"cannot read snapshot {path}: {exc}") from exc
    return TripleStore(parse_turtle(text))
