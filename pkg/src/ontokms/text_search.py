"""Inverted-index full-text search with TF-IDF ranking and edit-distance
suggestions for misspelled queries.

Tokenization folds diacritics after compatibility decomposition, so English
and Portuguese text share one vocabulary ("Epiléptica" and "epileptica" meet
at the same token). No stemming. Scores use raw term frequency times
ln(doc_count/df); a term present in every document contributes zero but its
documents still count as hits.
"""

from __future__ import annotations

import math
import unicodedata
from dataclasses import dataclass

from .errors import ValidationError

DOC_KINDS = ("ConceptLabel", "ConceptComment", "Record")


def tokenize(text: str) -> list[str]:
    """Lowercased, accent-folded word tokens of length >= 2, in text order."""
    decomposed = unicodedata.normalize("NFKD", text)
    folded = "".join(ch for ch in decomposed if not unicodedata.combining(ch)).lower()
    tokens = []
    current: list[str] = []
    for ch in folded:
        if ch.isalnum():
            current.append(ch)
        elif current:
            tokens.append("".join(current))
            current = []
    if current:
        tokens.append("".join(current))
    return [t for t in tokens if len(t) >= 2]


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance, iterative two-row dynamic program."""
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        current = [i]
        for j, cb in enumerate(b, 1):
            current.append(min(
                previous[j] + 1,
                current[j - 1] + 1,
                previous[j - 1] + (ca != cb),
            ))
        previous = current
    return previous[-1]


@dataclass(frozen=True, slots=True)
class DocRef:
    """Identity of one indexed text field."""

    kind: str
    owner: str  # concept IRI or record id
    lang: str | None = None

    def __post_init__(self):
        if self.kind not in DOC_KINDS:
            raise ValidationError(f"unknown doc kind {self.kind!r}")

    def sort_key(self):
        return (self.kind, self.owner, self.lang or "")

    def to_payload(self) -> dict:
        return {"kind": self.kind, "owner": self.owner, "lang": self.lang}


@dataclass(frozen=True, slots=True)
class SearchHit:
    doc: DocRef
    score: float
    snippet: str

    def to_payload(self) -> dict:
        return {"doc": self.doc.to_payload(), "score": self.score, "snippet": self.snippet}


def _snippet(text: str, limit: int = 160) -> str:
    text = " ".join(text.split())
    if len(text) <= limit:
        return text
    return text[:limit - 3].rstrip() + "..."


class InvertedIndex:
    """token -> (doc -> term frequency), plus per-doc bookkeeping.

    Empty documents (no tokens survive normalization) still count toward
    doc_count; re-indexing a DocRef replaces its previous content.
    """

    def __init__(self):
        self._postings: dict[str, dict[DocRef, int]] = {}
        self._doc_counts: dict[DocRef, dict[str, int]] = {}
        self._doc_texts: dict[DocRef, str] = {}

    @property
    def doc_count(self) -> int:
        return len(self._doc_counts)

    def doc_tokens(self, doc: DocRef) -> int:
        return sum(self._doc_counts.get(doc, {}).values())

    def vocabulary(self) -> list[str]:
        return sorted(self._postings)

    def documents(self) -> list[DocRef]:
        return sorted(self._doc_counts, key=DocRef.sort_key)

    def index_doc(self, doc: DocRef, text: str):
        if doc in self._doc_counts:
            self.remove_doc(doc)
        counts: dict[str, int] = {}
        for token in tokenize(text):
            counts[token] = counts.get(token, 0) + 1
        self._doc_counts[doc] = counts
        self._doc_texts[doc] = text
        for token, tf in counts.items():
            self._postings.setdefault(token, {})[doc] = tf

    def remove_doc(self, doc: DocRef):
        counts = self._doc_counts.pop(doc, None)
        self._doc_texts.pop(doc, None)
        if counts is None:
            return
        for token in counts:
            posting = self._postings[token]
            del posting[doc]
            if not posting:
                del self._postings[token]

    def snapshot(self) -> tuple:
        """Canonical value for whole-index equality checks."""
        postings = tuple(
            (token, tuple(sorted(((d.sort_key(), tf) for d, tf in posting.items()))))
            for token, posting in sorted(self._postings.items())
        )
        docs = tuple(sorted(
            (d.sort_key(), self._doc_texts[d]) for d in self._doc_counts
        ))
        return postings, docs

    def search(self, query: str, lang: str | None = None, k: int = 10) -> list[SearchHit]:
        """Top-k hits by (score desc, DocRef asc) among docs with >= 1 query token."""
        if k < 1:
            raise ValidationError("k must be >= 1")
        n = self.doc_count
        scores: dict[DocRef, float] = {}
        for token in tokenize(query):
            posting = self._postings.get(token)
            if not posting:
                continue
            idf = math.log(n / len(posting))
            for doc, tf in posting.items():
                if lang is not None and doc.lang != lang:
                    continue
                scores[doc] = scores.get(doc, 0.0) + tf * idf
        hits = [
            SearchHit(doc, score, _snippet(self._doc_texts[doc]))
            for doc, score in scores.items()
        ]
        hits.sort(key=lambda h: (-h.score, h.doc.sort_key()))
        return hits[:k]

    def suggest(self, query: str, max_distance: int = 2, k: int = 5) -> dict[str, list[tuple[str, int]]]:
        """Vocabulary tokens near each unknown query token.

        Keyed by the unknown token; candidates sorted by (distance, token),
        at most k each. Known tokens produce no entry.
        """
        out: dict[str, list[tuple[str, int]]] = {}
        vocabulary = self.vocabulary()
        for token in tokenize(query):
            if token in self._postings or token in out:
                continue
            candidates = []
            for word in vocabulary:
                distance = levenshtein(token, word)
                if distance <= max_distance:
                    candidates.append((distance, word))
            candidates.sort()
            out[token] = [(word, distance) for distance, word in candidates[:k]]
        return out
