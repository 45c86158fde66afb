"""Execution engine behind the job queue: full fact-check and rumour runs."""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from ..analytics import (
    geo_points,
    lda_fit,
    pca_project,
    propagation_graph_export,
    representative_tweet,
    sentiment,
    spread_metrics,
    topic_top_words,
    tweet_count_series,
    word_cloud,
)
from ..corpus import Claim, CorpusStore
from ..errors import EmptyCorpus
from ..inference import BuiltinNli, NliProvider, tweet_stances
from ..nlisan import NlisanParams, classify
from ..retrieval import (
    CosineReranker,
    Encoder,
    HashedTfidfEncoder,
    IndexUnit,
    InvertedIndex,
    Reranker,
    bm25_search,
    build_index,
    retrieve_evidence,
)
from ..rumournet import BigcnParams, aggregate_rumour, score_tree
from .config import ServiceConfig
from .jobs import JobKind

logger = logging.getLogger(__name__)

PARAGRAPH_INDEX_FILE = "index_paragraphs.json"
TREE_INDEX_FILE = "index_trees.json"


def autocomplete(claims, query: str, limit: int = 10) -> list[dict]:
    """Claim suggestions for a typed prefix.

    Case-insensitive; claims whose text starts with the query rank before
    claims merely containing it; within each band shorter texts first, then
    lexicographic. An empty query suggests nothing.
    """
    needle = query.strip().lower()
    if not needle:
        return []
    prefix_band = []
    contains_band = []
    for claim in claims:
        text = claim.text.lower()
        if text.startswith(needle):
            prefix_band.append(claim)
        elif needle in text:
            contains_band.append(claim)
    key = lambda c: (len(c.text), c.text.lower())
    ranked = sorted(prefix_band, key=key) + sorted(contains_band, key=key)
    return [{"claim_id": c.claim_id, "text": c.text, "label": c.label.value}
            for c in ranked[:limit]]


def paragraph_units(store: CorpusStore) -> list[IndexUnit]:
    units = []
    for para_id in sorted(store.paragraphs):
        para = store.paragraphs[para_id]
        doc = store.documents.get(para.doc_id)
        units.append(IndexUnit(unit_id=para.para_id, text=para.text,
                               source=doc.source if doc else "",
                               doc_type=doc.doc_type if doc else ""))
    return units


def tree_units(store: CorpusStore) -> list[IndexUnit]:
    # one unit per tree: the root tweet's text (replies are too noisy)
    units = []
    for tree_id in sorted(store.trees):
        tree = store.trees[tree_id]
        units.append(IndexUnit(unit_id=tree_id, text=tree.root.text,
                               source="twitter", doc_type="tree"))
    return units


def build_indexes(store: CorpusStore, persist: bool = True
                  ) -> tuple[InvertedIndex | None, InvertedIndex | None]:
    """Build (and optionally persist) the paragraph and tree indexes."""
    para_index = tree_index = None
    paras = paragraph_units(store)
    if paras:
        para_index = build_index(paras, kind="Paragraph")
        if persist:
            para_index.save(store.data_dir / PARAGRAPH_INDEX_FILE)
    trees = tree_units(store)
    if trees:
        tree_index = build_index(trees, kind="TreeText")
        if persist:
            tree_index.save(store.data_dir / TREE_INDEX_FILE)
    return para_index, tree_index


class PanaceaEngine:
    """Retrieval + classification + analytics for one deployment."""

    def __init__(self, store: CorpusStore,
                 paragraph_index: InvertedIndex | None,
                 tree_index: InvertedIndex | None,
                 encoder: Encoder,
                 reranker: Reranker | None = None,
                 nli: NliProvider | None = None,
                 nlisan_params: NlisanParams | None = None,
                 bigcn_params: BigcnParams | None = None,
                 n_trees: int = 10, lda_topics: int = 3, lda_iters: int = 200,
                 seed: int = 7):
        self.store = store
        self.paragraph_index = paragraph_index
        self.tree_index = tree_index
        self.encoder = encoder
        self.reranker = reranker or CosineReranker(encoder)
        self.nli = nli or BuiltinNli()
        self.nlisan_params = nlisan_params or NlisanParams.init(d=encoder.dim, seed=seed)
        self.bigcn_params = bigcn_params or BigcnParams.init(d=encoder.dim, seed=seed)
        self.n_trees = n_trees
        self.lda_topics = lda_topics
        self.lda_iters = lda_iters
        self.seed = seed

    # --- dispatch -----------------------------------------------------------

    def run(self, kind: JobKind, claim_text: str) -> dict:
        if kind is JobKind.FACT_CHECK:
            return self.fact_check(claim_text)
        return self.rumour(claim_text)

    def autocomplete(self, query: str, limit: int = 10) -> list[dict]:
        return autocomplete(self.store.claims.values(), query, limit)

    # --- fact checking -------------------------------------------------------

    def fact_check(self, claim_text: str) -> dict:
        if self.paragraph_index is None or self.paragraph_index.N == 0:
            raise EmptyCorpus("no knowledge base loaded")
        documents, sentences = retrieve_evidence(
            claim_text, self.paragraph_index, encoder=self.encoder,
            reranker=self.reranker, nli=self.nli)
        payload = {
            "claim": claim_text,
            "status": "ok" if documents else "no_evidence",
            "verdict": None,
            "p_true": None,
            "stance_distribution": _stance_distribution(documents + sentences),
            "documents": [d.to_json() for d in documents],
            "sentences": [s.to_json() for s in sentences],
        }
        if documents:
            verdict = classify(self.nlisan_params, claim_text, documents,
                               self.encoder, self.nli)
            payload["verdict"] = verdict.label.value
            payload["p_true"] = verdict.p_true
        return payload

    # --- rumour detection -----------------------------------------------------

    def rumour(self, claim_text: str) -> dict:
        trees = []
        if self.tree_index is not None and self.tree_index.N > 0:
            hits = bm25_search(self.tree_index, claim_text, self.n_trees)
            trees = [self.store.trees[uid] for uid, _ in hits]
        if not trees:
            return {
                "claim": claim_text, "status": "no_trees",
                "aggregate_score": None, "tree_scores": [],
                "panels": _empty_panels(),
            }
        scores = [score_tree(self.bigcn_params, tree, self.encoder) for tree in trees]
        nodes = [node for tree in trees for node in tree.bfs_nodes()]
        texts = [node.text for node in nodes]
        stances = tweet_stances(claim_text, texts, self.nli)
        sentiments = [sentiment(text).label.value for text in texts]

        payload = {
            "claim": claim_text,
            "status": "ok",
            "aggregate_score": aggregate_rumour(scores),
            "tree_scores": [{"tree_id": s.tree_id, "r": s.r, "n": s.n} for s in scores],
            "panels": {
                "tweet_count": [{"date": d, "count": c}
                                for d, c in tweet_count_series(trees)],
                "word_cloud": word_cloud(list(zip(texts, stances))),
                "topics": self._topics_panel(nodes),
                "spread": self._spread_panel(trees),
                "propagation": propagation_graph_export(
                    max(trees, key=lambda t: (t.size, t.tree_id)),
                    self.store.trees_by_claim(), seed=self.seed),
                "map": geo_points(list(zip(nodes, stances))),
            },
            "tweet_sentiments": [
                {"tweet_id": node.tweet_id, "sentiment": label}
                for node, label in zip(nodes, sentiments)
            ],
        }
        return payload

    def _spread_panel(self, trees) -> list[dict]:
        records = []
        for tree in trees:
            for rec in spread_metrics(tree):
                records.append({"tweet_id": rec.tweet_id, "direct": rec.direct,
                                "total": rec.total, "post_time": rec.post_time,
                                "tree_id": tree.tree_id})
        return records

    def _topics_panel(self, nodes) -> dict:
        texts = [node.text for node in nodes]
        try:
            k = max(1, min(self.lda_topics, len(texts)))
            model = lda_fit(texts, K=k, iters=self.lda_iters, seed=self.seed)
        except EmptyCorpus:
            return {"points": [], "topics": []}
        tweets = [(node.tweet_id, node.text) for node in nodes]
        topic_docs = []
        vectors = []
        for topic in range(model.K):
            top = topic_top_words(model, topic, n=10)
            rep_id = representative_tweet(model, topic, tweets, self.encoder)
            rep_text = next(text for tid, text in tweets if tid == rep_id)
            weight = float(model.theta[:, topic].mean())
            topic_docs.append({
                "topic": topic,
                "weight": weight,
                "top_words": [[w, wt] for w, wt in top],
                "representative_tweet": {"tweet_id": rep_id, "text": rep_text},
            })
            vec = np.zeros(self.encoder.dim)
            for word, wt in top:
                vec += wt * self.encoder.encode(word)
            vectors.append(vec)
        if model.K >= 2:
            try:
                projected = pca_project(np.vstack(vectors), out_dim=2)
                points = [{"topic": i, "x": float(xy[0]), "y": float(xy[1]),
                           "weight": topic_docs[i]["weight"]}
                          for i, xy in enumerate(projected.coordinates)]
            except Exception:
                points = [{"topic": i, "x": 0.0, "y": 0.0,
                           "weight": topic_docs[i]["weight"]}
                          for i in range(model.K)]
        else:
            points = [{"topic": 0, "x": 0.0, "y": 0.0,
                       "weight": topic_docs[0]["weight"]}]
        return {"points": points, "topics": topic_docs}


def _stance_distribution(records) -> dict[str, int]:
    dist = {"Support": 0, "Neutral": 0, "Refute": 0}
    for rec in records:
        dist[rec.stance.value] += 1
    return dist


def _empty_panels() -> dict:
    return {"tweet_count": [], "word_cloud": {"Support": [], "Refute": []},
            "topics": {"points": [], "topics": []}, "spread": [],
            "propagation": {"main": None, "comparisons": []}, "map": []}


def build_engine(config: ServiceConfig) -> PanaceaEngine:
    """Assemble stores, indexes, and model parameters per the config."""
    store = CorpusStore(config.data_dir)
    para_path = Path(config.data_dir) / PARAGRAPH_INDEX_FILE
    tree_path = Path(config.data_dir) / TREE_INDEX_FILE
    para_index = InvertedIndex.load(para_path) if para_path.exists() else None
    tree_index = InvertedIndex.load(tree_path) if tree_path.exists() else None
    if para_index is None or tree_index is None:
        built_para, built_tree = build_indexes(store, persist=False)
        para_index = para_index or built_para
        tree_index = tree_index or built_tree
    encoder = HashedTfidfEncoder(dim=config.encoder_dim, index=para_index)
    nlisan_params = (NlisanParams.load(config.nlisan_checkpoint)
                     if config.nlisan_checkpoint else None)
    bigcn_params = (BigcnParams.load(config.bigcn_checkpoint)
                    if config.bigcn_checkpoint else None)
    for name, params in (("nlisan", nlisan_params), ("bigcn", bigcn_params)):
        if params is not None and params.d != encoder.dim:
            logger.warning("%s checkpoint dim %d != encoder dim %d",
                           name, params.d, encoder.dim)
    return PanaceaEngine(
        store=store, paragraph_index=para_index, tree_index=tree_index,
        encoder=encoder, nlisan_params=nlisan_params, bigcn_params=bigcn_params,
        n_trees=config.n_trees, lda_topics=config.lda_topics,
        lda_iters=config.lda_iters, seed=config.seed,
    )
