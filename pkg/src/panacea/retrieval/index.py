"""Inverted index with Okapi BM25 scoring.

First retrieval stage: ``bm25_search`` over paragraph units (fact-checking)
or root-tweet texts (tree retrieval). Parameters k1=0.9, b=0.4 and the
+1-smoothed IDF are configurable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from ..corpus.text import tokenize
from ..errors import EmptyCorpus

DEFAULT_K1 = 0.9
DEFAULT_B = 0.4


@dataclass
class IndexUnit:
    """One indexed retrieval unit plus the metadata surfaced on evidence."""
    unit_id: str
    text: str
    source: str = ""
    doc_type: str = ""


@dataclass
class InvertedIndex:
    kind: str                                   # "Paragraph" | "TreeText"
    postings: dict[str, list[tuple[str, int]]]  # term -> [(unit_id, tf)], sorted by unit_id
    doc_lengths: dict[str, int]
    avg_doc_length: float
    N: int
    units: dict[str, IndexUnit] = field(default_factory=dict)

    def idf(self, term: str) -> float:
        n_t = len(self.postings.get(term, ()))
        return math.log((self.N - n_t + 0.5) / (n_t + 0.5) + 1.0)

    def save(self, path: str | Path) -> None:
        payload = {
            "kind": self.kind,
            "postings": {t: [[uid, tf] for uid, tf in plist]
                         for t, plist in self.postings.items()},
            "doc_lengths": self.doc_lengths,
            "avg_doc_length": self.avg_doc_length,
            "N": self.N,
            "units": {uid: vars(u) for uid, u in self.units.items()},
        }
        Path(path).write_text(json.dumps(payload), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "InvertedIndex":
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(
            kind=payload["kind"],
            postings={t: [(uid, tf) for uid, tf in plist]
                      for t, plist in payload["postings"].items()},
            doc_lengths=payload["doc_lengths"],
            avg_doc_length=payload["avg_doc_length"],
            N=payload["N"],
            units={uid: IndexUnit(**rec) for uid, rec in payload["units"].items()},
        )


def build_index(units: Sequence[IndexUnit] | Iterable[IndexUnit],
                kind: str = "Paragraph") -> InvertedIndex:
    """Index units by term. Raises EmptyCorpus when no units are given."""
    units = list(units)
    if not units:
        raise EmptyCorpus("no units to index")
    postings: dict[str, dict[str, int]] = {}
    doc_lengths: dict[str, int] = {}
    catalog: dict[str, IndexUnit] = {}
    for unit in units:
        tokens = tokenize(unit.text)
        doc_lengths[unit.unit_id] = len(tokens)
        catalog[unit.unit_id] = unit
        for term in tokens:
            bucket = postings.setdefault(term, {})
            bucket[unit.unit_id] = bucket.get(unit.unit_id, 0) + 1
    sorted_postings = {
        term: sorted(by_unit.items()) for term, by_unit in postings.items()
    }
    n = len(doc_lengths)
    avg = sum(doc_lengths.values()) / n
    return InvertedIndex(kind=kind, postings=sorted_postings,
                         doc_lengths=doc_lengths, avg_doc_length=avg,
                         N=n, units=catalog)


def bm25_search(index: InvertedIndex, query: str, k: int,
                k1: float = DEFAULT_K1, b: float = DEFAULT_B) -> list[tuple[str, float]]:
    """Top-k units by Okapi BM25, descending score, ties by ascending unit_id.

    Query term occurrences each contribute; units matching no term are
    omitted. An empty query yields an empty result.
    """
    terms = tokenize(query)
    if not terms or index.N == 0:
        return []
    scores: dict[str, float] = {}
    avg = index.avg_doc_length or 1.0
    for term in terms:
        plist = index.postings.get(term)
        if not plist:
            continue
        idf = index.idf(term)
        for unit_id, tf in plist:
            dl = index.doc_lengths[unit_id]
            denom = tf + k1 * (1.0 - b + b * dl / avg)
            scores[unit_id] = scores.get(unit_id, 0.0) + idf * tf * (k1 + 1.0) / denom
    ranked = sorted(((uid, s) for uid, s in scores.items() if s > 0.0),
                    key=lambda pair: (-pair[1], pair[0]))
    return ranked[:k]
