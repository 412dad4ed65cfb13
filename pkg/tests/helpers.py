"""Shared test fixtures: randomized stores and independent oracles.

Everything here is deliberately naive; the oracles must stay independent of
the code paths they check.
"""

from __future__ import annotations

import itertools
import random
import re

from ontokms.rdf_store import Term, Triple, TripleStore, iri, literal, n3
from ontokms.sparql_engine import LangFilter, Query, RegexFilter, Variable

EX = "http://example.org/t/"


def term_pool(rng: random.Random, n_subjects=12, n_predicates=6, n_objects=15):
    """Small, overlapping pools so random stores produce join-able data."""
    subjects = [iri(f"{EX}s{i}") for i in range(n_subjects)]
    predicates = [iri(f"{EX}p{i}") for i in range(n_predicates)]
    objects: list[Term] = [iri(f"{EX}s{i}") for i in range(n_subjects // 2)]
    for i in range(n_objects - n_subjects // 2):
        if i % 3 == 0:
            objects.append(literal(f"word{i} crise épileptique", "pt"))
        elif i % 3 == 1:
            objects.append(literal(f"label {i}", "en"))
        else:
            objects.append(iri(f"{EX}o{i}"))
    return subjects, predicates, objects


def random_store(rng: random.Random, max_triples=100, pool=None) -> TripleStore:
    subjects, predicates, objects = pool or term_pool(rng)
    store = TripleStore()
    for _ in range(rng.randrange(max_triples + 1)):
        store.insert(
            Triple(rng.choice(subjects), rng.choice(predicates), rng.choice(objects))
        )
    return store


def brute_force_match(triples, s=None, p=None, o=None):
    """Linear scan filter, sorted by the order the chosen index defines."""
    hits = [
        t
        for t in triples
        if (s is None or t.s == s) and (p is None or t.p == p) and (o is None or t.o == o)
    ]
    if s is not None or (p is None and o is None):
        key = lambda t: (n3(t.s), n3(t.p), n3(t.o))
    elif p is not None:
        key = lambda t: (n3(t.p), n3(t.o), n3(t.s))
    else:
        key = lambda t: (n3(t.o), n3(t.s), n3(t.p))
    return sorted(hits, key=key)


def _oracle_columns(q: Query) -> list[str]:
    if q.select_vars is not None:
        return list(q.select_vars)
    names = {
        x.name
        for pat in q.patterns
        for x in (pat.s, pat.p, pat.o)
        if isinstance(x, Variable)
    }
    return sorted(names)


def exhaustive_evaluate(store: TripleStore, q: Query) -> list[tuple[str, ...]]:
    """Brute-force query answers: try every assignment of variables to terms.

    Returns the projected rows as tuples of canonical encodings, fully
    post-processed (filters, DISTINCT, sort, OFFSET/LIMIT). Only tractable for
    stores built over small term pools and queries with few variables.
    """
    facts = {(t.s, t.p, t.o) for t in store.triples()}
    universe = sorted({x for fact in facts for x in fact}, key=n3)
    names = sorted(
        {
            x.name
            for pat in q.patterns
            for x in (pat.s, pat.p, pat.o)
            if isinstance(x, Variable)
        }
    )

    solutions = []
    for combo in itertools.product(universe, repeat=len(names)):
        binding = dict(zip(names, combo))
        ground = lambda x: binding[x.name] if isinstance(x, Variable) else x
        if all((ground(p.s), ground(p.p), ground(p.o)) in facts for p in q.patterns):
            solutions.append(binding)

    kept = []
    for binding in solutions:
        ok = True
        for f in q.filters:
            term = binding[f.var]
            if isinstance(f, RegexFilter):
                flags = re.IGNORECASE if "i" in f.flags else 0
                ok = re.search(f.pattern, term.value, flags) is not None
            elif isinstance(f, LangFilter):
                ok = (not term.is_iri) and (term.lang or "") == f.tag
            if not ok:
                break
        if ok:
            kept.append(binding)

    columns = _oracle_columns(q)
    rows = [tuple(n3(b[v]) for v in columns) for b in kept]
    rows = sorted(set(rows)) if q.distinct else sorted(rows)
    rows = rows[q.offset:]
    if q.limit is not None:
        rows = rows[:q.limit]
    return rows


def encoded_rows(results: list[dict[str, Term]]) -> list[tuple[str, ...]]:
    """Evaluator output in the oracle's comparison format."""
    return [tuple(n3(t) for t in row.values()) for row in results]


_SAFE_REGEXES = ["a", "o", "ó", "word", "label", "s1", "[aeiou]", "^http", "e$", "l.b"]


def random_query_text(rng: random.Random, store: TripleStore) -> str:
    """Valid random query over the store's vocabulary, as parseable text.

    Bounded at 3 patterns and 3 distinct variables to keep the exhaustive
    oracle affordable.
    """
    kw = lambda w: rng.choice((w.upper(), w.lower(), w.capitalize()))
    facts = store.triples()
    pool = term_pool(rng)
    names = ["x", "y", "z"][: rng.randint(1, 3)]

    n_patterns = 0 if rng.random() < 0.05 else rng.randint(1, 3)
    patterns = []
    used = []
    for _ in range(n_patterns):
        if facts and rng.random() < 0.9:
            base = rng.choice(facts)
            ground = (base.s, base.p, base.o)
        else:
            ground = (rng.choice(pool[0]), rng.choice(pool[1]), rng.choice(pool[2]))
        parts = []
        for value in ground:
            if rng.random() < 0.55:
                name = rng.choice(names)
                parts.append(f"?{name}")
                if name not in used:
                    used.append(name)
            else:
                parts.append(n3(value))
        patterns.append(" ".join(parts) + " .")

    filters = []
    if used and rng.random() < 0.4:
        name = rng.choice(used)
        if rng.random() < 0.6:
            pattern = rng.choice(_SAFE_REGEXES)
            if rng.random() < 0.5:
                filters.append(f'{kw("FILTER")}(regex(?{name}, "{pattern}", "i"))')
            else:
                filters.append(f'{kw("FILTER")}(regex(?{name}, "{pattern}"))')
        else:
            tag = rng.choice(["en", "pt", ""])
            filters.append(f'{kw("FILTER")}(lang(?{name}) = "{tag}")')

    if not used or rng.random() < 0.3:
        select = "*"
    else:
        chosen = rng.sample(used, rng.randint(1, len(used)))
        select = " ".join(f"?{name}" for name in chosen)

    text = [kw("SELECT")]
    if rng.random() < 0.4:
        text.append(kw("DISTINCT"))
    text.append(select)
    text.append(kw("WHERE"))
    text.append("{")
    text.extend(patterns)
    text.extend(filters)
    text.append("}")
    if rng.random() < 0.4:
        text.append(f'{kw("LIMIT")} {rng.randint(0, 8)}')
    if rng.random() < 0.3:
        text.append(f'{kw("OFFSET")} {rng.randint(0, 5)}')
    return " ".join(text)


def random_ontology_op(rng: random.Random, mgr) -> tuple[str, Exception | None]:
    """One randomized management call, occasionally invalid on purpose.

    Returns (op name, raised domain error or None). Refused operations must
    leave the store untouched; that atomicity is asserted here via the
    store's generation counter.
    """
    from ontokms.errors import KmsError

    ids = mgr.concept_ids()
    non_roots = [c for c in ids if c not in mgr.schema.roots]
    base = mgr.schema.base_iri
    pick = rng.random()
    generation = mgr.store.generation

    def bilingual(stem):
        return {"en": f"{stem} en", "pt": f"{stem} pt"}

    if pick < 0.45 or not non_roots:
        op = "create"
    elif pick < 0.6:
        op = "annotate"
    elif pick < 0.75:
        op = "move"
    elif pick < 0.85:
        op = "rename"
    else:
        op = "delete"

    try:
        if op == "create":
            cid = iri(f"{base}SYN-Fuzz-{rng.randrange(10**9):09d}")
            if ids and rng.random() < 0.93:
                parents = set(rng.sample(ids, rng.randint(1, min(2, len(ids)))))
            else:
                parents = {iri(f"{base}Missing-{rng.randrange(999):03d}")}
            labels = bilingual(f"fuzz label {rng.randrange(10**6)}")
            if rng.random() < 0.05:
                labels = {"en": "only english"}
            mgr.create_concept(cid, parents, labels, bilingual("fuzz comment"))
        elif op == "annotate":
            cid = rng.choice(non_roots)
            use_labels = rng.random() < 0.7
            mgr.annotate_concept(
                cid,
                labels=bilingual(f"re {rng.randrange(10**6)}") if use_labels else None,
                comments=None if use_labels and rng.random() < 0.5
                else bilingual(f"rc {rng.randrange(10**6)}"),
            )
        elif op == "move":
            cid = rng.choice(non_roots)
            targets = set(rng.sample(ids, rng.randint(1, min(2, len(ids)))))
            mgr.move_concept(cid, targets)
        elif op == "rename":
            cid = rng.choice(non_roots)
            mgr.rename_concept(cid, iri(f"{base}SYN-Renamed-{rng.randrange(10**9):09d}"))
        else:
            cid = rng.choice(non_roots + list(mgr.schema.roots))
            mode = rng.choice(["refuse_if_children", "reparent_children"])
            mgr.delete_concept(cid, mode)
        return op, None
    except KmsError as exc:
        assert mgr.store.generation == generation, f"refused {op} mutated the store"
        return op, exc


def hierarchy_is_acyclic(store) -> bool:
    """Independent DFS cycle check over subClassOf edges."""
    from ontokms.rdf_store import RDFS_SUBCLASSOF

    sub = iri(RDFS_SUBCLASSOF)
    edges: dict[Term, list[Term]] = {}
    for t in store.match(None, sub, None):
        edges.setdefault(t.s, []).append(t.o)

    state: dict[Term, int] = {}
    for start in list(edges):
        if start in state:
            continue
        stack = [(start, iter(edges.get(start, ())))]
        state[start] = 1
        while stack:
            node, nexts = stack[-1]
            nxt = next(nexts, None)
            if nxt is None:
                stack.pop()
                state[node] = 2
            elif state.get(nxt) == 1:
                return False
            elif nxt not in state:
                state[nxt] = 1
                stack.append((nxt, iter(edges.get(nxt, ()))))
    return True


_TEXT_WORDS = [
    "seizure", "crise", "epileptic", "epiléptica", "onset", "aura", "eeg",
    "sono", "sleep", "generalizada", "focal", "tonic", "clônica", "myoclonic",
    "ausência", "absence", "ictal", "interictal", "spike", "onda",
]


def random_text(rng: random.Random, max_words=12) -> str:
    words = [rng.choice(_TEXT_WORDS) for _ in range(rng.randrange(max_words + 1))]
    return rng.choice([" ", " - ", ", "]).join(words)


def random_docref(rng: random.Random, i: int):
    from ontokms.text_search import DocRef

    kind = rng.choice(("ConceptLabel", "ConceptComment", "Record"))
    if kind == "Record":
        return DocRef(kind, f"rec-{i}")
    return DocRef(kind, f"http://example.org/c{i}", rng.choice(("en", "pt")))


def brute_force_scores(raw_docs: dict, query: str, lang=None) -> dict:
    """TF-IDF recomputed from raw text, independent of index bookkeeping."""
    import math

    from ontokms.text_search import tokenize

    n = len(raw_docs)
    doc_tokens = {doc: tokenize(text) for doc, text in raw_docs.items()}
    scores = {}
    for doc, tokens in doc_tokens.items():
        if lang is not None and doc.lang != lang:
            continue
        total = 0.0
        contains_any = False
        for q in tokenize(query):
            df = sum(1 for other in doc_tokens.values() if q in other)
            if df == 0:
                continue
            tf = tokens.count(q)
            if tf:
                contains_any = True
            total += tf * math.log(n / df)
        if contains_any:
            scores[doc] = total
    return scores


def random_kb_step(rng: random.Random, kb) -> tuple[str, Exception | None]:
    """One randomized KnowledgeBase mutation: management op or an ingest."""
    import json

    if rng.random() < 0.9:
        return random_ontology_op(rng, kb)
    rows = []
    for _ in range(rng.randrange(4)):
        rid = f"rec-{rng.randrange(10**9):09d}"
        if rng.random() < 0.1:
            rows.append(json.dumps({"record_id": rid, "table": "t", "field": "f", "text": " "}))
        else:
            rows.append(json.dumps({
                "record_id": rid,
                "table": rng.choice(["pat_event", "eeg_session"]),
                "field": "notes",
                "text": random_text(rng) or "registro sem conteúdo útil",
            }))
    kb.ingest("\n".join(rows) + "\n", "jsonl")
    return "ingest", None


def bfs_oracle(store, center, depth: int) -> dict:
    """Plain frontier-by-frontier BFS over undirected subClassOf edges."""
    from ontokms.rdf_store import RDFS_SUBCLASSOF

    sub = iri(RDFS_SUBCLASSOF)
    adjacency: dict[Term, set[Term]] = {}
    for t in store.match(None, sub, None):
        adjacency.setdefault(t.s, set()).add(t.o)
        adjacency.setdefault(t.o, set()).add(t.s)
    distances = {center: 0}
    frontier = [center]
    d = 0
    while frontier and d < depth:
        next_frontier = []
        for node in frontier:
            for nb in adjacency.get(node, ()):
                if nb not in distances:
                    distances[nb] = d + 1
                    next_frontier.append(nb)
        frontier = next_frontier
        d += 1
    return distances


def levenshtein_reference(a: str, b: str, _cache=None) -> int:
    """Unit-cost edit distance straight from the recursive definition."""
    if _cache is None:
        _cache = {}
    key = (a, b)
    if key in _cache:
        return _cache[key]
    if not a:
        result = len(b)
    elif not b:
        result = len(a)
    else:
        result = min(
            levenshtein_reference(a[1:], b, _cache) + 1,
            levenshtein_reference(a, b[1:], _cache) + 1,
            levenshtein_reference(a[1:], b[1:], _cache) + (a[0] != b[0]),
        )
    _cache[key] = result
    return result
