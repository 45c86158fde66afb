"""Tokenization and paragraph chunking."""

from __future__ import annotations

import re

from ..errors import EmptyDocument
from .models import Document, Paragraph

# Maximal alphanumeric runs; underscore is not alphanumeric.
_TOKEN = re.compile(r"[^\W_]+", re.UNICODE)

MAX_PARAGRAPH_TOKENS = 300


def tokenize(text: str) -> list[str]:
    """Lowercased maximal alphanumeric runs, in order of appearance."""
    return _TOKEN.findall(text.lower())


def chunk_document(doc: Document, max_tokens: int = MAX_PARAGRAPH_TOKENS) -> list[Paragraph]:
    """Greedy left-to-right grouping of the body's tokens into <=max_tokens runs.

    Paragraph text is the run's tokens joined by single spaces, so
    concatenating all paragraphs in ordinal order reproduces the tokenized
    body exactly.
    """
    tokens = tokenize(doc.body)
    if not tokens:
        raise EmptyDocument(f"document {doc.doc_id} has an empty body")
    paragraphs = []
    for ordinal, start in enumerate(range(0, len(tokens), max_tokens)):
        run = tokens[start:start + max_tokens]
        paragraphs.append(Paragraph(
            para_id=f"{doc.doc_id}#{ordinal}",
            doc_id=doc.doc_id,
            ordinal=ordinal,
            text=" ".join(run),
            token_count=len(run),
        ))
    return paragraphs
