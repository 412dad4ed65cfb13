"""Parser and evaluator for the SELECT query subset used by the system.

Grammar (keywords case-insensitive)::

    query   := prefix* 'SELECT' 'DISTINCT'? ('*' | var+)
               'WHERE' '{' (pattern '.')* filter* '}'
               ('LIMIT' INT)? ('OFFSET' INT)?
    prefix  := 'PREFIX' PNAME: IRIREF
    pattern := term term term
    filter  := 'FILTER' '(' 'regex' '(' var ',' STRING (',' STRING)? ')'
                         | 'lang' '(' var ')' '=' STRING ')'
    term    := ?var | <iri> | prefixed:name | 'a' | STRING ('@' langtag)?

Evaluation is a nested-loop join over the store's match() primitive,
patterns reordered most-bound-first. Result order is made deterministic by
sorting solutions on the canonical encoding of the selected terms; DISTINCT
deduplicates the projected rows. OFFSET/LIMIT apply after the sort.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ParseError
from .rdf_store import RDF_TYPE, Term, TripleStore, iri, literal, n3

_VAR_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_LANG_RE = re.compile(r"^[a-z]{2}(-[a-z0-9]{2,8})*$")


@dataclass(frozen=True, slots=True)
class Variable:
    name: str


@dataclass(frozen=True, slots=True)
class TriplePattern:
    s: Term | Variable
    p: Term | Variable
    o: Term | Variable

    def variables(self) -> set[str]:
        return {x.name for x in (self.s, self.p, self.o) if isinstance(x, Variable)}

    def bound_count(self) -> int:
        return sum(isinstance(x, Term) for x in (self.s, self.p, self.o))


@dataclass(frozen=True, slots=True)
class RegexFilter:
    var: str
    pattern: str
    flags: str = ""  # "" or "i"


@dataclass(frozen=True, slots=True)
class LangFilter:
    var: str
    tag: str


FilterExpr = RegexFilter | LangFilter


@dataclass(slots=True)
class Query:
    prefixes: dict[str, str] = field(default_factory=dict)
    select_vars: list[str] | None = None  # None means '*'
    distinct: bool = False
    patterns: list[TriplePattern] = field(default_factory=list)
    filters: list[FilterExpr] = field(default_factory=list)
    limit: int | None = None
    offset: int = 0


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def error(self, message, line=None, col=None):
        raise ParseError(message, line or self.line, col or self.col)

    def _advance(self, n=1):
        for _ in range(n):
            if self.pos < len(self.text):
                if self.text[self.pos] == "\n":
                    self.line += 1
                    self.col = 1
                else:
                    self.col += 1
                self.pos += 1

    def _peek(self, offset=0):
        i = self.pos + offset
        return self.text[i] if i < len(self.text) else ""

    def tokens(self):
        toks = []
        while True:
            while self.pos < len(self.text):
                ch = self.text[self.pos]
                if ch == "#":
                    while self.pos < len(self.text) and self.text[self.pos] != "\n":
                        self._advance()
                elif ch.isspace():
                    self._advance()
                else:
                    break
            line, col = self.line, self.col
            ch = self._peek()
            if not ch:
                toks.append(("eof", None, line, col))
                return toks
            if ch == "?":
                self._advance()
                name = self._read_while(lambda c: c.isalnum() or c == "_")
                if not _VAR_RE.match(name):
                    self.error(f"malformed variable name {name!r}", line, col)
                toks.append(("var", name, line, col))
            elif ch == "<":
                toks.append(("iriref", self._read_iriref(), line, col))
            elif ch == '"':
                toks.append(("string", self._read_string(), line, col))
            elif ch == "@":
                self._advance()
                word = self._read_while(lambda c: c.isalnum() or c == "-")
                toks.append(("at", word, line, col))
            elif ch in "{}(),.=*":
                self._advance()
                toks.append((ch, None, line, col))
            elif ch.isdigit():
                num = self._read_while(str.isdigit)
                toks.append(("int", int(num), line, col))
            elif ch.isalpha() or ch == "_" or ch == ":":
                word = self._read_while(lambda c: c.isalnum() or c in "_-.:")
                while word.endswith("."):
                    word = word[:-1]
                    self.pos -= 1
                    self.col -= 1
                if ":" in word:
                    prefix, local = word.split(":", 1)
                    toks.append(("pname", (prefix, local), line, col))
                else:
                    toks.append(("word", word, line, col))
            else:
                self.error(f"unexpected character {ch!r}")

    def _read_while(self, pred):
        start = self.pos
        while self.pos < len(self.text) and pred(self.text[self.pos]):
            self._advance()
        return self.text[start:self.pos]

    def _read_iriref(self):
        line, col = self.line, self.col
        self._advance()
        out = []
        while True:
            ch = self._peek()
            if not ch or ch == "\n":
                self.error("unterminated IRI", line, col)
            if ch == ">":
                self._advance()
                return "".join(out)
            self._advance()
            out.append(ch)

    def _read_string(self):
        line, col = self.line, self.col
        self._advance()
        out = []
        while True:
            ch = self._peek()
            if not ch or ch == "\n":
                self.error("unterminated string", line, col)
            if ch == '"':
                self._advance()
                return "".join(out)
            if ch == "\\":
                nxt = self._peek(1)
                simple = {"t": "\t", "n": "\n", "r": "\r", '"': '"', "\\": "\\"}
                if nxt in simple:
                    out.append(simple[nxt])
                    self._advance(2)
                elif nxt in ("u", "U"):
                    width = 4 if nxt == "u" else 8
                    digits = self.text[self.pos + 2:self.pos + 2 + width]
                    if len(digits) < width or any(
                        c not in "0123456789abcdefABCDEF" for c in digits
                    ):
                        self.error(f"malformed \\{nxt} escape")
                    out.append(chr(int(digits, 16)))
                    self._advance(2 + width)
                else:
                    self.error(f"illegal escape '\\{nxt}'")
            else:
                self._advance()
                out.append(ch)


class _Parser:
    def __init__(self, text: str):
        self.toks = _Lexer(text).tokens()
        self.i = 0
        self.query = Query()

    def _peek(self):
        return self.toks[self.i]

    def _next(self):
        tok = self.toks[self.i]
        if tok[0] != "eof":
            self.i += 1
        return tok

    def _error(self, message, tok):
        raise ParseError(message, tok[2], tok[3])

    def _keyword(self) -> str | None:
        tok = self._peek()
        if tok[0] == "word":
            return tok[1].upper()
        return None

    def _expect_keyword(self, word):
        tok = self._next()
        if tok[0] != "word" or tok[1].upper() != word:
            self._error(f"expected {word}", tok)

    def _expect(self, kind):
        tok = self._next()
        if tok[0] != kind:
            self._error(f"expected {kind!r}, got {tok[0]!r}", tok)
        return tok

    def parse(self) -> Query:
        q = self.query
        while self._keyword() == "PREFIX":
            self._next()
            tok = self._expect("pname")
            if tok[1][1] != "":
                self._error("expected prefix name ending in ':'", tok)
            iri_tok = self._expect("iriref")
            q.prefixes[tok[1][0]] = iri_tok[1]

        self._expect_keyword("SELECT")
        if self._keyword() == "DISTINCT":
            self._next()
            q.distinct = True
        if self._peek()[0] == "*":
            self._next()
            q.select_vars = None
        else:
            names = []
            while self._peek()[0] == "var":
                names.append(self._next()[1])
            if not names:
                self._error("expected '*' or at least one variable", self._peek())
            q.select_vars = names

        self._expect_keyword("WHERE")
        self._expect("{")
        while self._peek()[0] not in ("}", "eof") and self._keyword() != "FILTER":
            q.patterns.append(self._pattern())
        while self._keyword() == "FILTER":
            q.filters.append(self._filter())
        self._expect("}")

        if self._keyword() == "LIMIT":
            self._next()
            q.limit = self._expect("int")[1]
        if self._keyword() == "OFFSET":
            self._next()
            q.offset = self._expect("int")[1]
        tok = self._peek()
        if tok[0] != "eof":
            self._error(f"unexpected trailing {tok[0]!r}", tok)

        self._check(q)
        return q

    def _pattern(self) -> TriplePattern:
        s = self._term(predicate=False)
        p = self._term(predicate=True)
        o = self._term(predicate=False)
        self._expect(".")
        return TriplePattern(s, p, o)

    def _term(self, predicate: bool) -> Term | Variable:
        tok = self._next()
        if tok[0] == "var":
            return Variable(tok[1])
        if tok[0] == "iriref":
            return self._iri(tok[1], tok)
        if tok[0] == "pname":
            prefix, local = tok[1]
            if prefix not in self.query.prefixes:
                self._error(f"unknown prefix {prefix!r}", tok)
            return self._iri(self.query.prefixes[prefix] + local, tok)
        if tok[0] == "word" and tok[1] == "a" and predicate:
            return iri(RDF_TYPE)
        if tok[0] == "string":
            value = tok[1]
            if self._peek()[0] == "at":
                at = self._next()
                tag = at[1].lower()
                if not _LANG_RE.match(tag):
                    self._error(f"malformed language tag {at[1]!r}", at)
                return literal(value, tag)
            return literal(value)
        self._error(f"expected term, got {tok[0]!r}", tok)

    def _iri(self, value, tok) -> Term:
        try:
            return iri(value)
        except Exception as exc:
            self._error(str(exc), tok)

    def _filter(self) -> FilterExpr:
        self._next()  # FILTER
        self._expect("(")
        tok = self._next()
        name = tok[1].lower() if tok[0] == "word" else None
        if name == "regex":
            self._expect("(")
            var = self._expect("var")[1]
            self._expect(",")
            pat_tok = self._expect("string")
            flags = ""
            if self._peek()[0] == ",":
                self._next()
                flags_tok = self._expect("string")
                flags = flags_tok[1]
                if flags not in ("", "i"):
                    self._error(f"unsupported regex flags {flags!r}", flags_tok)
            try:
                re.compile(pat_tok[1])
            except re.error as exc:
                self._error(f"bad regex: {exc}", pat_tok)
            self._expect(")")
            self._expect(")")
            return RegexFilter(var, pat_tok[1], flags)
        if name == "lang":
            self._expect("(")
            var = self._expect("var")[1]
            self._expect(")")
            self._expect("=")
            tag = self._expect("string")[1].lower()
            self._expect(")")
            return LangFilter(var, tag)
        self._error("expected regex(...) or lang(...) in FILTER", tok)

    def _check(self, q: Query):
        pattern_vars = set()
        for pat in q.patterns:
            pattern_vars |= pat.variables()
        if q.select_vars is not None:
            for name in q.select_vars:
                if name not in pattern_vars:
                    raise ParseError(
                        f"selected variable ?{name} does not appear in any pattern", 1, 1
                    )
        for f in q.filters:
            if f.var not in pattern_vars:
                raise ParseError(
                    f"filter variable ?{f.var} does not appear in any pattern", 1, 1
                )


def parse_query(text: str) -> Query:
    return _Parser(text).parse()


def select_order(q: Query) -> list[str]:
    """Projection column order: explicit SELECT order, or sorted names for '*'."""
    if q.select_vars is not None:
        return list(q.select_vars)
    names: set[str] = set()
    for pat in q.patterns:
        names |= pat.variables()
    return sorted(names)


def _passes(f: FilterExpr, binding: dict[str, Term]) -> bool:
    term = binding[f.var]
    if isinstance(f, RegexFilter):
        flags = re.IGNORECASE if "i" in f.flags else 0
        return re.search(f.pattern, term.value, flags) is not None
    if not term.is_iri:
        return (term.lang or "") == f.tag
    return False


def evaluate(store: TripleStore, q: Query) -> list[dict[str, Term]]:
    """All solutions of the query over the store, deterministically ordered.

    Bindings are projected to the selected variables; each dict preserves the
    projection column order.
    """
    ordered = sorted(
        range(len(q.patterns)), key=lambda i: (-q.patterns[i].bound_count(), i)
    )
    solutions: list[dict[str, Term]] = [{}]
    for idx in ordered:
        pat = q.patterns[idx]
        next_solutions = []
        for binding in solutions:
            parts = []
            for x in (pat.s, pat.p, pat.o):
                if isinstance(x, Variable):
                    parts.append(binding.get(x.name))
                else:
                    parts.append(x)
            for t in store.match(*parts):
                extended = dict(binding)
                ok = True
                for x, value in zip((pat.s, pat.p, pat.o), (t.s, t.p, t.o)):
                    if isinstance(x, Variable):
                        seen = extended.get(x.name)
                        if seen is None:
                            extended[x.name] = value
                        elif seen != value:
                            ok = False
                            break
                if ok:
                    next_solutions.append(extended)
        solutions = next_solutions
        if not solutions:
            break

    solutions = [b for b in solutions if all(_passes(f, b) for f in q.filters)]

    columns = select_order(q)
    if q.distinct:
        seen = set()
        deduped = []
        for b in solutions:
            key = tuple(n3(b[v]) for v in columns)
            if key not in seen:
                seen.add(key)
                deduped.append(b)
        solutions = deduped

    solutions.sort(key=lambda b: tuple(n3(b[v]) for v in columns))
    solutions = solutions[q.offset:]
    if q.limit is not None:
        solutions = solutions[:q.limit]
    return [{v: b[v] for v in columns} for b in solutions]
