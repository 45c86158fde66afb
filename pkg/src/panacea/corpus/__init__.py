from .models import (
    Claim,
    ClaimLabel,
    Document,
    LabelProvenance,
    Paragraph,
    PropagationTree,
    RumourLabel,
    Stance,
    TweetNode,
)
from .store import CorpusStore, TreeReport, validate_tree
from .text import MAX_PARAGRAPH_TOKENS, chunk_document, tokenize

__all__ = [
    "Claim", "ClaimLabel", "Document", "LabelProvenance", "Paragraph",
    "PropagationTree", "RumourLabel", "Stance", "TweetNode",
    "CorpusStore", "TreeReport", "validate_tree",
    "MAX_PARAGRAPH_TOKENS", "chunk_document", "tokenize",
]
