"""Acceptance gate: one test per release criterion, one verdict line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the PASS lines with
their measured numbers. Every test is self-contained and seeded, so a failure
reproduces byte-for-byte.
"""

import itertools
import json
import random
import string
import time

import pytest
from fastapi.testclient import TestClient

from ontokms.api_service import create_app
from ontokms.cli import cli
from ontokms.ingest import RecordCatalog
from ontokms.kms import KnowledgeBase, build_index
from ontokms.ontology_mgmt import (
    BASE_IRI,
    ChangeLog,
    OntologyManager,
    OntologySchema,
    generate_seed,
    replay_changes,
    validate,
)
from ontokms.rdf_store import TripleStore, parse_turtle, serialize
from ontokms.sparql_engine import evaluate, parse_query
from ontokms.text_search import DocRef, InvertedIndex, levenshtein

from helpers import (
    encoded_rows,
    exhaustive_evaluate,
    hierarchy_is_acyclic,
    levenshtein_reference,
    random_kb_step,
    random_ontology_op,
    random_query_text,
    random_store,
    random_text,
    brute_force_scores,
)


def report(name: str, detail: str):
    print(f"PASS {name}: {detail}")


def test_acceptance_seed_statistics(tmp_path, capsys):
    start = time.perf_counter()
    data = str(tmp_path / "data")
    assert cli(["--data-dir", data, "seed"]) == 0
    assert cli(["--data-dir", data, "validate"]) == 0
    elapsed = time.perf_counter() - start
    out = capsys.readouterr().out
    assert "concepts=145 labels=290 comments=290" in out
    assert "0 violations" in out
    assert elapsed < 5.0
    with capsys.disabled():
        report("seed statistics", f"145/290/290, 0 violations in {elapsed:.2f}s")


def test_acceptance_four_branches():
    store = generate_seed()
    mgr = OntologyManager(store)
    parentless = sorted(c.value for c in mgr.concept_ids() if not mgr.parents_of(c))
    expected = sorted(BASE_IRI + local for local in (
        "GeneralConcept", "SeizureType", "EpilepticSyndrome", "Electroencephalography"))
    assert parentless == expected
    labels = {mgr.get_concept(c).labels["en"] for c in mgr.schema.roots}
    assert labels == {"General concepts", "Seizures Types", "Epileptic Syndromes",
                      "Electroencephalography"}
    report("four branches", "root set and labels exact")


def test_acceptance_sparql_oracle_equivalence():
    rng = random.Random(20260816)
    start = time.perf_counter()
    for case in range(200):
        store = random_store(rng, max_triples=500)
        text = random_query_text(rng, store)
        q = parse_query(text)
        got = encoded_rows(evaluate(store, q))
        want = exhaustive_evaluate(store, q)
        assert sorted(got) == sorted(want), f"case {case}: {text}"
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0
    report("SPARQL oracle equivalence", f"200/200 cases in {elapsed:.2f}s")


def test_acceptance_round_trip():
    rng = random.Random(4242)
    for case in range(100):
        store = random_store(rng, max_triples=rng.randint(0, 120))
        for fmt in ("ntriples", "turtle"):
            text = serialize(store, fmt)
            reparsed = TripleStore(parse_turtle(text))
            assert reparsed == store, f"case {case} format {fmt}"
        first = serialize(store, "ntriples")
        second = serialize(TripleStore(parse_turtle(first)), "ntriples")
        assert second == first, f"case {case} not byte-identical"
    report("turtle/ntriples round trip", "100/100 stores, both formats, byte-identical")


def test_acceptance_index_coherence():
    rng = random.Random(1000)
    kb = KnowledgeBase(None)
    kb.seed()
    applied = 0
    for _ in range(1000):
        op, err = random_kb_step(rng, kb)
        if err is None:
            applied += 1
    rebuilt = build_index(kb.store, kb.catalog)
    assert kb.index.snapshot() == rebuilt.snapshot()

    raw = {}
    for cid in kb.concept_ids():
        concept = kb.get_concept(cid)
        for kind, mapping in (("ConceptLabel", concept.labels),
                              ("ConceptComment", concept.comments)):
            for lang in ("en", "pt"):
                if lang in mapping:
                    raw[DocRef(kind, cid.value, lang)] = mapping[lang]
    for record in kb.catalog.all_records():
        raw[DocRef("Record", record.record_id)] = record.text
    for query in ("seizure crise", "sintetico", "eeg sono onda", random_text(rng)):
        for lang in (None, "en", "pt"):
            expected = brute_force_scores(raw, query, lang)
            hits = kb.search(query, lang=lang, k=len(raw) or 1)
            got = {hit.doc: hit.score for hit in hits}
            assert set(got) == set(expected)
            for doc, score in expected.items():
                assert got[doc] == pytest.approx(score, rel=1e-9, abs=1e-12)
    report("index coherence", f"{applied} applied ops; incremental == rebuild; "
           "scores within 1e-9")


def test_acceptance_suggestion_correctness():
    # Exhaustive oracle equality over every pair of strings up to length 4 on
    # {a, b, c}; lengths 5 to 8 are covered by a large seeded sample because
    # the full cartesian product at length 8 (~97M pairs) is out of budget for
    # a test suite. The sample draws both strings independently per trial.
    alphabet = "abc"
    short = [""]
    for n in range(1, 5):
        short += ["".join(p) for p in itertools.product(alphabet, repeat=n)]
    checked = 0
    for a in short:
        for b in short:
            assert levenshtein(a, b) == levenshtein_reference(a, b), (a, b)
            checked += 1

    rng = random.Random(88)
    for _ in range(30000):
        a = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 8)))
        b = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 8)))
        assert levenshtein(a, b) == levenshtein_reference(a, b), (a, b)
        checked += 1

    index = InvertedIndex()
    vocabulary = ["seizure", "seizures", "secure", "sciences", "absence",
                  "ausencia", "epilepsy", "epilepsia", "sleep", "sharp"]
    for i, word in enumerate(vocabulary):
        index.index_doc(DocRef("Record", f"d{i}"), word)
    for max_distance in (0, 1, 2, 3, 4):
        for query in ("siezure", "epilepsi", "absense zzz", "ausencla sleap"):
            for token, candidates in index.suggest(query, max_distance=max_distance,
                                                   k=10).items():
                assert candidates == sorted(candidates, key=lambda c: (c[1], c[0]))
                for word, distance in candidates:
                    assert distance == levenshtein(token, word) <= max_distance
    report("suggestion correctness", f"{checked} oracle pairs; ordering and "
           "max_distance respected")


def test_acceptance_consistency_preservation():
    rng = random.Random(77001)
    store = generate_seed()
    log = ChangeLog()
    log.append("Import", "seed", {"kind": "seed"})
    mgr = OntologyManager(store, log=log)
    refused = 0
    for step in range(10000):
        op, err = random_ontology_op(rng, mgr)
        if err is not None:
            refused += 1
        if step % 500 == 499:
            assert hierarchy_is_acyclic(store), f"cycle after step {step}"
            assert validate(store).violations == [], f"violations after step {step}"
    assert hierarchy_is_acyclic(store)
    report_obj = validate(store)
    assert report_obj.violations == []
    replayed = replay_changes(log.records)
    assert replayed == store, "replay diverged from live store"
    report("consistency preservation",
           f"10000 steps ({refused} refused), 0 violations, replay exact, "
           f"{len(store)} triples final")


def test_acceptance_api_contract(tmp_path):
    kb = KnowledgeBase(tmp_path / "data")
    kb.seed()
    with TestClient(create_app(kb)) as client:
        def changes():
            return len(client.get("/changes").json()["data"]["changes"])

        concept = {
            "id": "AcceptanceConcept",
            "parents": ["GeneralConcept"],
            "labels": {"en": "Acceptance", "pt": "Aceitacao"},
            "comments": {"en": "Gate check.", "pt": "Verificacao."},
        }
        row = json.dumps({"record_id": "acc-1", "table": "t", "field": "f",
                          "text": "acceptance record"})
        mutations = [
            lambda: client.post("/concepts", json=concept),
            lambda: client.patch("/concepts/AcceptanceConcept",
                                 json={"labels": {"en": "A2", "pt": "B2"}}),
            lambda: client.patch("/concepts/AcceptanceConcept",
                                 json={"parents": ["SeizureType"]}),
            lambda: client.patch("/concepts/AcceptanceConcept",
                                 json={"id": "AcceptanceRenamed"}),
            lambda: client.delete("/concepts/AcceptanceRenamed"),
            lambda: client.post("/import", json={
                "content": "<http://x.example/a> <http://x.example/b> "
                           "<http://x.example/c> .\n"}),
            lambda: client.post("/ingest", json={"content": row, "format": "jsonl"}),
        ]
        for i, call in enumerate(mutations):
            before = changes()
            resp = call()
            assert resp.status_code in (200, 201), (i, resp.text)
            assert changes() == before + 1, f"mutation {i} appended != 1 record"

        expectations = [
            (client.get("/concepts/DoesNotExist"), 404, "NotFound"),
            (client.delete("/concepts/GeneralConcept"), 409, "Conflict"),
            (client.patch("/concepts/SYN-GeneralConcept-000",
                          json={"parents": ["SYN-GeneralConcept-005"]}), 409, "Cycle"),
            (client.post("/query", json={"query": "SELECT nope"}), 422, "Parse"),
            (client.post("/concepts", json=dict(concept, labels={"en": "x"})),
             422, "Validation"),
            (client.post("/import", json={"path": "/no/such/file.nt"}), 500, "Io"),
        ]
        for resp, status, code in expectations:
            assert resp.status_code == status, resp.text
            assert resp.json()["error"]["code"] == code
    report("API contract", "7 mutation endpoints append exactly one record; "
           "404/409/422/500 mapping verified")
