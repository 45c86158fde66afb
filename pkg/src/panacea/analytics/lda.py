"""Topic modelling by collapsed Gibbs sampling.

One sequential sweep order per iteration keeps the sampler deterministic for
a fixed seed. Hyperparameter defaults alpha=50/K, beta=0.01.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..assets_io import load_stopwords
from ..corpus.text import tokenize
from ..errors import BadTopicIndex, EmptyCorpus, InvalidK, NoTweets
from ..retrieval.encoder import Encoder, cosine

DEFAULT_BETA = 0.01
DEFAULT_ITERS = 500


@dataclass
class TopicModel:
    K: int
    phi: np.ndarray            # K x V word distributions
    theta: np.ndarray          # D x K document distributions
    vocabulary: list[str]
    topic_word_counts: np.ndarray  # K x V raw assignment counts

    def word_index(self, word: str) -> int | None:
        try:
            return self.vocabulary.index(word)
        except ValueError:
            return None


def lda_fit(docs, K: int, alpha: float | None = None, beta: float = DEFAULT_BETA,
            iters: int = DEFAULT_ITERS, seed: int = 0,
            stopwords: frozenset | None = None) -> TopicModel:
    """Collapsed Gibbs sampling over token-topic assignments.

    phi and theta come from the smoothed counts after the final sweep.
    Documents that are empty after stopword removal keep a uniform theta row.
    """
    if K < 1:
        raise InvalidK(f"K={K}")
    if alpha is None:
        alpha = 50.0 / K
    stopwords = load_stopwords() if stopwords is None else stopwords

    doc_tokens = [[t for t in tokenize(doc) if t not in stopwords] for doc in docs]
    if not any(doc_tokens):
        raise EmptyCorpus("no usable tokens after stopword removal")
    vocabulary = sorted({t for toks in doc_tokens for t in toks})
    word_ids = {w: i for i, w in enumerate(vocabulary)}
    V, D = len(vocabulary), len(doc_tokens)

    flat_docs: list[int] = []
    flat_words: list[int] = []
    for d, toks in enumerate(doc_tokens):
        for tok in toks:
            flat_docs.append(d)
            flat_words.append(word_ids[tok])
    docs_arr = np.array(flat_docs, dtype=np.int64)
    words_arr = np.array(flat_words, dtype=np.int64)
    n_tokens = len(docs_arr)

    rng = np.random.default_rng(seed)
    z = rng.integers(0, K, size=n_tokens)

    n_kv = np.zeros((K, V), dtype=np.float64)
    n_k = np.zeros(K, dtype=np.float64)
    n_dk = np.zeros((D, K), dtype=np.float64)
    np.add.at(n_kv, (z, words_arr), 1.0)
    np.add.at(n_k, z, 1.0)
    np.add.at(n_dk, (docs_arr, z), 1.0)

    v_beta = V * beta
    for _ in range(iters):
        for i in range(n_tokens):
            d, w, k_old = docs_arr[i], words_arr[i], z[i]
            n_kv[k_old, w] -= 1.0
            n_k[k_old] -= 1.0
            n_dk[d, k_old] -= 1.0
            weights = (n_kv[:, w] + beta) / (n_k + v_beta) * (n_dk[d] + alpha)
            cum = np.cumsum(weights)
            k_new = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
            z[i] = k_new
            n_kv[k_new, w] += 1.0
            n_k[k_new] += 1.0
            n_dk[d, k_new] += 1.0

    phi = (n_kv + beta) / (n_k[:, None] + v_beta)
    doc_totals = n_dk.sum(axis=1, keepdims=True)
    theta = (n_dk + alpha) / (doc_totals + K * alpha)
    return TopicModel(K=K, phi=phi, theta=theta, vocabulary=vocabulary,
                      topic_word_counts=n_kv)


def topic_top_words(model: TopicModel, k_topic: int, n: int = 10) -> list[tuple[str, float]]:
    """Top-n words of a topic by phi weight, ties broken lexicographically."""
    if not 0 <= k_topic < model.K:
        raise BadTopicIndex(f"topic {k_topic} outside [0, {model.K})")
    row = model.phi[k_topic]
    order = sorted(range(len(model.vocabulary)),
                   key=lambda v: (-row[v], model.vocabulary[v]))
    return [(model.vocabulary[v], float(row[v])) for v in order[:n]]


def representative_tweet(model: TopicModel, k_topic: int, tweets, encoder: Encoder) -> str:
    """Tweet whose embedding is closest to the topic vector.

    The topic vector is the phi-weighted average of the embeddings of the
    topic's top-10 words; ties resolve to the smaller tweet_id. ``tweets``
    is a sequence of (tweet_id, text) pairs.
    """
    tweets = list(tweets)
    if not tweets:
        raise NoTweets("no tweets to choose from")
    top = topic_top_words(model, k_topic, n=10)
    topic_vec = np.zeros(encoder.dim)
    for word, weight in top:
        topic_vec += weight * encoder.encode(word)
    best = min(
        ((-cosine(encoder.encode(text), topic_vec), tweet_id)
         for tweet_id, text in tweets),
    )
    return best[1]
