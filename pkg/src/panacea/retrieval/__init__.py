from .encoder import CosineReranker, Encoder, HashedTfidfEncoder, Reranker, cosine
from .evaluation import (
    DEFAULT_KS,
    JudgedQuery,
    average_precision_at_k,
    evaluate_pipeline,
    load_judged,
)
from .index import DEFAULT_B, DEFAULT_K1, IndexUnit, InvertedIndex, bm25_search, build_index
from .pipeline import EvidenceRecord, retrieve_evidence, split_sentences

__all__ = [
    "CosineReranker", "Encoder", "HashedTfidfEncoder", "Reranker", "cosine",
    "DEFAULT_KS", "JudgedQuery", "average_precision_at_k", "evaluate_pipeline",
    "load_judged",
    "DEFAULT_B", "DEFAULT_K1", "IndexUnit", "InvertedIndex", "bm25_search",
    "build_index",
    "EvidenceRecord", "retrieve_evidence", "split_sentences",
]
