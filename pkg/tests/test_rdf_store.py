import itertools
import random

import pytest
from helpers import brute_force_match, random_store, term_pool

from ontokms.errors import ValidationError
from ontokms.rdf_store import (
    RDFS_SUBCLASSOF,
    Triple,
    TripleStore,
    iri,
    literal,
    serialize,
)

SUB = iri(RDFS_SUBCLASSOF)
A, B, C = iri("http://e/A"), iri("http://e/B"), iri("http://e/C")


def test_insert_into_empty_store():
    store = TripleStore()
    assert store.insert(Triple(A, SUB, B)) is True
    assert len(store) == 1


def test_insert_duplicate_is_noop():
    store = TripleStore()
    t = Triple(A, SUB, B)
    assert store.insert(t) is True
    gen = store.generation
    assert store.insert(Triple(A, SUB, B)) is False
    assert len(store) == 1
    assert store.generation == gen


def test_insert_order_does_not_matter():
    triples = [Triple(A, SUB, B), Triple(B, SUB, C), Triple(A, SUB, C)]
    dumps = set()
    for perm in itertools.permutations(triples):
        store = TripleStore(perm)
        dumps.add(serialize(store, "ntriples"))
    assert len(dumps) == 1


def test_remove():
    store = TripleStore()
    t = Triple(A, SUB, B)
    store.insert(t)
    assert store.remove(t) is True
    assert len(store) == 0
    assert store.remove(t) is False


def test_remove_from_empty_store():
    assert TripleStore().remove(Triple(A, SUB, B)) is False


def test_remove_leaves_other_triples():
    t1, t2 = Triple(A, SUB, B), Triple(B, SUB, C)
    store = TripleStore([t1, t2])
    store.remove(t1)
    assert store.match() == [t2]


def test_malformed_subject_rejected():
    with pytest.raises(ValidationError):
        Triple(literal("x"), SUB, B)
    with pytest.raises(ValidationError):
        Triple(A, literal("p"), B)


def test_bad_terms_rejected():
    for bad in ["", "http://e/a b", "http://e/<x>", 'http://e/"x', "http://e/\x00"]:
        with pytest.raises(ValidationError):
            iri(bad)
    with pytest.raises(ValidationError):
        literal("x", "EN")
    with pytest.raises(ValidationError):
        literal("x", "e")


def test_term_equality():
    assert literal("x", "en") == literal("x", "en")
    assert literal("x", "en") != literal("x", "pt")
    assert literal("x") != iri("x:y")


def test_match_bound_object():
    store = TripleStore([Triple(A, SUB, B)])
    assert store.match(None, SUB, B) == [Triple(A, SUB, B)]


def test_match_empty_store():
    assert TripleStore().match() == []


def test_match_is_pure():
    rng = random.Random(7)
    store = random_store(rng, max_triples=60)
    first = store.match(None, None, None)
    assert store.match(None, None, None) == first


def _pattern_choices(store, rng):
    triples = store.triples()
    if not triples:
        return [None, None, None]
    t = rng.choice(triples)
    return [t.s, t.p, t.o]


def test_match_equals_brute_force_scan():
    rng = random.Random(42)
    for _ in range(25):
        store = random_store(rng, max_triples=100)
        triples = store.triples()
        s, p, o = _pattern_choices(store, rng)
        for mask in range(8):
            ms = s if mask & 4 else None
            mp = p if mask & 2 else None
            mo = o if mask & 1 else None
            assert store.match(ms, mp, mo) == brute_force_match(triples, ms, mp, mo)


def test_match_on_large_store_equals_scan():
    rng = random.Random(3)
    pool = term_pool(rng, n_subjects=60, n_predicates=12, n_objects=80)
    store = TripleStore()
    subjects, predicates, objects = pool
    while len(store) < 10_000:
        store.insert(
            Triple(rng.choice(subjects), rng.choice(predicates), rng.choice(objects))
        )
    triples = store.triples()
    s, p, o = subjects[0], predicates[0], objects[0]
    for mask in range(8):
        ms = s if mask & 4 else None
        mp = p if mask & 2 else None
        mo = o if mask & 1 else None
        assert store.match(ms, mp, mo) == brute_force_match(triples, ms, mp, mo)


def test_indexes_agree_after_random_mutations():
    rng = random.Random(11)
    pool = term_pool(rng)
    subjects, predicates, objects = pool
    store = TripleStore()
    live = set()
    for _ in range(500):
        t = Triple(rng.choice(subjects), rng.choice(predicates), rng.choice(objects))
        if rng.random() < 0.6:
            store.insert(t)
            live.add(t)
        else:
            store.remove(t)
            live.discard(t)
    assert len(store._spo) == len(store._pos) == len(store._osp) == len(live)
    assert set(store.match()) == live
    assert {(e[2], e[0], e[1]) for e in store._pos} == set(store._spo)
    assert {(e[1], e[2], e[0]) for e in store._osp} == set(store._spo)


def test_generation_increases_on_mutation():
    store = TripleStore()
    gens = [store.generation]
    store.insert(Triple(A, SUB, B))
    gens.append(store.generation)
    store.insert(Triple(B, SUB, C))
    gens.append(store.generation)
    store.remove(Triple(A, SUB, B))
    gens.append(store.generation)
    assert gens == sorted(set(gens))
