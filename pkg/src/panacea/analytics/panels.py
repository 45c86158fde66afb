"""Data pipelines behind the visualisation panels."""

from __future__ import annotations

import random
from dataclasses import dataclass
from datetime import datetime, timezone
from functools import lru_cache

from ..assets_io import load_stopwords, read_asset
from ..corpus.models import PropagationTree, Stance, TweetNode
from ..corpus.text import tokenize
from ..errors import InvalidTree

STANCE_COLORS = {
    Stance.REFUTE: "red",
    Stance.NEUTRAL: "yellow",
    Stance.SUPPORT: "blue",
}


def _utc_date(post_time: str) -> str | None:
    if not post_time:
        return None
    try:
        stamp = datetime.fromisoformat(post_time.replace("Z", "+00:00"))
    except ValueError:
        return None
    if stamp.tzinfo is None:
        stamp = stamp.replace(tzinfo=timezone.utc)
    return stamp.astimezone(timezone.utc).date().isoformat()


def tweet_count_series(trees) -> list[tuple[str, int]]:
    """Tweets per UTC calendar date across all trees; gaps omitted."""
    counts: dict[str, int] = {}
    for tree in trees:
        for node in tree.nodes.values():
            day = _utc_date(node.post_time)
            if day is not None:
                counts[day] = counts.get(day, 0) + 1
    return sorted(counts.items())


def _cloud_tokens(text: str, stopwords) -> list[str]:
    return [t for t in tokenize(text) if t not in stopwords and not t.isdigit()]


def word_cloud(tweets_with_stances, n: int = 30,
               stopwords: frozenset | None = None) -> dict[str, list[tuple[str, int]]]:
    """Top-n word counts among supporting and refuting tweets.

    Stopwords, punctuation, and numbers are removed; neutral tweets are
    excluded entirely. Ties break lexicographically.
    """
    stopwords = load_stopwords() if stopwords is None else stopwords
    counts: dict[Stance, dict[str, int]] = {Stance.SUPPORT: {}, Stance.REFUTE: {}}
    for text, stance in tweets_with_stances:
        if stance not in counts:
            continue
        bucket = counts[stance]
        for token in _cloud_tokens(text, stopwords):
            bucket[token] = bucket.get(token, 0) + 1
    out = {}
    for stance, bucket in counts.items():
        ranked = sorted(bucket.items(), key=lambda kv: (-kv[1], kv[0]))
        out[stance.value] = ranked[:n]
    return out


@dataclass
class SpreadRecord:
    tweet_id: str
    direct: int    # immediate children
    total: int     # all descendants
    post_time: str


def spread_metrics(tree: PropagationTree) -> list[SpreadRecord]:
    """Per-node direct and transitive spread counts, in breadth-first order."""
    try:
        ordered = list(tree.bfs_nodes())
    except ValueError as exc:
        raise InvalidTree(str(exc)) from exc
    if len(ordered) != tree.size:
        raise InvalidTree(f"tree {tree.tree_id}: unreachable nodes")
    children: dict[str, list[str]] = {}
    for node in tree.nodes.values():
        if node.parent_id is not None:
            children.setdefault(node.parent_id, []).append(node.tweet_id)
    totals: dict[str, int] = {}
    for node in reversed(ordered):  # leaves first
        kids = children.get(node.tweet_id, [])
        totals[node.tweet_id] = len(kids) + sum(totals[k] for k in kids)
    return [SpreadRecord(tweet_id=node.tweet_id,
                         direct=len(children.get(node.tweet_id, [])),
                         total=totals[node.tweet_id],
                         post_time=node.post_time)
            for node in ordered]


def _graph_doc(tree: PropagationTree) -> dict:
    depths = tree.depths()
    nodes = [{
        "tweet_id": node.tweet_id,
        "parent_id": node.parent_id,
        "depth": depths[node.tweet_id],
        "post_time": node.post_time,
        "retweet_count": node.retweet_count,
    } for node in tree.bfs_nodes()]
    edges = [[node.parent_id, node.tweet_id]
             for node in tree.bfs_nodes() if node.parent_id is not None]
    return {"tree_id": tree.tree_id, "size": tree.size, "nodes": nodes, "edges": edges}


POPULAR_POOL_SIZE = 10
N_COMPARISONS = 5


def propagation_graph_export(tree: PropagationTree, comparison_pool: dict,
                             seed: int = 0, n_comparisons: int = N_COMPARISONS) -> dict:
    """Graph document for a tree plus seeded comparison-claim graphs.

    ``comparison_pool`` maps claim_id to that claim's stored trees. Claim
    popularity is its tree count (ties by claim_id); the comparisons are a
    seeded sample of n from the most popular claims, each contributing its
    largest tree. Fewer comparisons are emitted when the pool is small.
    """
    candidates = [cid for cid in comparison_pool
                  if comparison_pool[cid] and cid != tree.claim_ref]
    candidates.sort(key=lambda cid: (-len(comparison_pool[cid]), cid))
    pool = candidates[:POPULAR_POOL_SIZE]
    chosen = random.Random(seed).sample(pool, min(n_comparisons, len(pool)))
    comparisons = []
    for cid in sorted(chosen):
        largest = max(comparison_pool[cid], key=lambda t: (t.size, t.tree_id))
        comparisons.append({"claim_id": cid, "graph": _graph_doc(largest)})
    return {"main": _graph_doc(tree), "comparisons": comparisons}


class Gazetteer:
    """Case-insensitive exact place-name -> centroid lookup."""

    def __init__(self, entries: dict[str, tuple[float, float]]):
        self.entries = {name.lower(): coords for name, coords in entries.items()}

    @staticmethod
    @lru_cache(maxsize=1)
    def bundled() -> "Gazetteer":
        entries = {}
        for line in read_asset("gazetteer.txt"):
            name, lat, lon = line.split("\t")
            entries[name] = (float(lat), float(lon))
        return Gazetteer(entries)

    def resolve(self, location) -> tuple[float, float] | None:
        if location is None:
            return None
        if isinstance(location, tuple):
            return location
        return self.entries.get(location.strip().lower())


def geo_points(tweets_with_stances, gazetteer: Gazetteer | None = None) -> list[dict]:
    """Map points for locatable tweets, coloured by stance.

    ``tweets_with_stances`` is a sequence of (TweetNode, Stance). Tweets with
    explicit coordinates use them directly; place names resolve through the
    gazetteer; unresolvable tweets are omitted.
    """
    gazetteer = gazetteer or Gazetteer.bundled()
    points = []
    for node, stance in tweets_with_stances:
        coords = gazetteer.resolve(node.location)
        if coords is None:
            continue
        points.append({
            "tweet_id": node.tweet_id,
            "lat": coords[0],
            "lon": coords[1],
            "stance": stance.value,
            "color": STANCE_COLORS[stance],
        })
    return points
