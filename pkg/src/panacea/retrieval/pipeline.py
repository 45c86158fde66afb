"""Multi-stage evidence retrieval: BM25 -> rerank -> sentence selection."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..corpus.models import Stance
from ..corpus.text import tokenize
from ..errors import EmptyCorpus
from ..inference import BuiltinNli, NliProvider, NliTriplet, stance_of
from .encoder import CosineReranker, Encoder, HashedTfidfEncoder, Reranker, cosine
from .index import InvertedIndex, bm25_search

_TERMINATORS = ".!?"
_MIN_SENTENCE_TOKENS = 3


@dataclass
class EvidenceRecord:
    """A ranked paragraph or sentence with relevance, stance, and provenance."""
    unit_id: str
    text: str
    relevance: float
    stance_triplet: NliTriplet
    stance: Stance
    source: str = ""
    doc_type: str = ""
    kind: str = "Document"            # "Document" | "Sentence"
    char_start: Optional[int] = None  # sentence offsets within the parent paragraph
    char_end: Optional[int] = None

    def to_json(self) -> dict:
        c, n, e = self.stance_triplet.as_tuple()
        return {
            "unit_id": self.unit_id, "text": self.text, "relevance": self.relevance,
            "stance": self.stance.value,
            "stance_triplet": {"contradiction": c, "neutral": n, "entailment": e},
            "source": self.source, "doc_type": self.doc_type, "kind": self.kind,
            "char_start": self.char_start, "char_end": self.char_end,
        }


def split_sentences(text: str) -> list[str]:
    """Split after '.', '!' or '?' followed by whitespace; merge short fragments.

    Fragments are exact slices of the input, so every returned sentence is a
    substring of ``text``; fragments of fewer than 3 tokens are merged into
    the previous sentence (the slice then spans both fragments).
    """
    if not text.strip():
        return []
    spans: list[tuple[int, int]] = []
    start = 0
    i = 0
    n = len(text)
    while i < n:
        if text[i] in _TERMINATORS and i + 1 < n and text[i + 1].isspace():
            spans.append((start, i + 1))
            i += 1
            while i < n and text[i].isspace():
                i += 1
            start = i
        else:
            i += 1
    if start < n and text[start:].strip():
        spans.append((start, n))

    merged: list[tuple[int, int]] = []
    for span in spans:
        fragment = text[span[0]:span[1]]
        if merged and len(tokenize(fragment)) < _MIN_SENTENCE_TOKENS:
            merged[-1] = (merged[-1][0], span[1])
        else:
            merged.append(span)
    return [text[a:b].strip() for a, b in merged]


def retrieve_evidence(
    claim_text: str,
    index: InvertedIndex,
    encoder: Encoder | None = None,
    reranker: Reranker | None = None,
    nli: NliProvider | None = None,
    n1: int = 100,
    n2: int = 10,
    n3: int = 3,
) -> tuple[list[EvidenceRecord], list[EvidenceRecord]]:
    """Three-stage retrieval over a paragraph index.

    Stage 1: BM25 top-n1. Stage 2: rerank those, keep top-n2 in reranker-score
    order (ties by ascending unit_id). Stage 3: per kept paragraph, rank its
    sentences by claim-sentence embedding cosine and keep top-n3. Every
    record's relevance is the claim-text embedding cosine; stance comes from
    the NLI provider with the evidence as premise.
    """
    if index.N == 0:
        raise EmptyCorpus("index is empty")
    encoder = encoder or HashedTfidfEncoder(index=index)
    reranker = reranker or CosineReranker(encoder)
    nli = nli or BuiltinNli()

    claim_vec = encoder.encode(claim_text)

    stage1 = bm25_search(index, claim_text, n1)
    reranked = sorted(
        ((reranker.score(claim_text, index.units[uid].text), uid) for uid, _ in stage1),
        key=lambda pair: (-pair[0], pair[1]),
    )[:n2]

    documents: list[EvidenceRecord] = []
    sentences: list[EvidenceRecord] = []
    for _, uid in reranked:
        unit = index.units[uid]
        triplet = nli.infer(unit.text, claim_text)
        documents.append(EvidenceRecord(
            unit_id=uid, text=unit.text,
            relevance=cosine(claim_vec, encoder.encode(unit.text)),
            stance_triplet=triplet, stance=stance_of(triplet),
            source=unit.source, doc_type=unit.doc_type, kind="Document",
        ))

        ranked_sentences = []
        for j, sentence in enumerate(split_sentences(unit.text)):
            rel = cosine(claim_vec, encoder.encode(sentence))
            ranked_sentences.append((-rel, j, sentence))
        ranked_sentences.sort()
        for neg_rel, j, sentence in ranked_sentences[:n3]:
            s_triplet = nli.infer(sentence, claim_text)
            offset = unit.text.find(sentence)
            sentences.append(EvidenceRecord(
                unit_id=f"{uid}#s{j}", text=sentence, relevance=-neg_rel,
                stance_triplet=s_triplet, stance=stance_of(s_triplet),
                source=unit.source, doc_type=unit.doc_type, kind="Sentence",
                char_start=offset if offset >= 0 else None,
                char_end=offset + len(sentence) if offset >= 0 else None,
            ))
    return documents, sentences
