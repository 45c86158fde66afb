"""Domain records: documents, paragraphs, claims, and propagation trees."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional, Union

Location = Union[str, tuple[float, float], None]


class ClaimLabel(str, Enum):
    TRUE = "True"
    FALSE = "False"
    UNLABELLED = "Unlabelled"


class Stance(str, Enum):
    SUPPORT = "Support"
    NEUTRAL = "Neutral"
    REFUTE = "Refute"


class RumourLabel(str, Enum):
    RUMOUR = "Rumour"
    NON_RUMOUR = "NonRumour"


class LabelProvenance(str, Enum):
    ANNOTATED = "Annotated"
    PSEUDO = "Pseudo"


@dataclass
class Document:
    """One knowledge-base document from a vetted source.

    ``doc_id`` is unique within a store and ``body`` is non-empty; both are
    enforced at ingestion.
    """
    doc_id: str
    title: str
    body: str
    source: str
    doc_type: str
    url: str = ""
    date: str = ""


@dataclass
class Paragraph:
    """A retrieval unit of at most 300 tokens cut from a document body."""
    para_id: str          # "<doc_id>#<ordinal>"
    doc_id: str
    ordinal: int
    text: str
    token_count: int


@dataclass
class Claim:
    claim_id: str
    text: str
    label: ClaimLabel = ClaimLabel.UNLABELLED
    source: str = ""
    subtype: str = ""


@dataclass
class TweetNode:
    tweet_id: str
    parent_id: Optional[str]
    user_id: str
    post_time: str        # ISO-8601
    text: str
    location: Location = None
    retweet_count: int = 0

    @property
    def is_root(self) -> bool:
        return self.parent_id is None


@dataclass
class PropagationTree:
    """A rooted tweet tree; the unit of rumour scoring.

    ``nodes`` maps tweet_id to node. Structural invariants (single root,
    reachability, acyclicity) are checked by :func:`panacea.corpus.store.validate_tree`
    rather than the constructor, because real ingested data is messy and the
    violations must be reportable.
    """
    tree_id: str
    nodes: dict[str, TweetNode]
    claim_ref: Optional[str] = None
    stance_label: Optional[Stance] = None
    rumour_label: Optional[RumourLabel] = None
    rumour_provenance: Optional[LabelProvenance] = None
    rumour_prob: Optional[float] = None

    @property
    def size(self) -> int:
        return len(self.nodes)

    @property
    def root(self) -> TweetNode:
        roots = [n for n in self.nodes.values() if n.is_root]
        if len(roots) != 1:
            raise ValueError(f"tree {self.tree_id} has {len(roots)} roots")
        return roots[0]

    def children_of(self, tweet_id: str) -> list[TweetNode]:
        kids = [n for n in self.nodes.values() if n.parent_id == tweet_id]
        kids.sort(key=lambda n: n.tweet_id)
        return kids

    def bfs_nodes(self) -> Iterator[TweetNode]:
        """Breadth-first traversal from the root, siblings by ascending tweet_id."""
        queue = deque([self.root])
        seen = {self.root.tweet_id}
        while queue:
            node = queue.popleft()
            yield node
            for child in self.children_of(node.tweet_id):
                if child.tweet_id not in seen:
                    seen.add(child.tweet_id)
                    queue.append(child)

    def depths(self) -> dict[str, int]:
        """Hop distance from the root for every reachable node."""
        out = {self.root.tweet_id: 0}
        queue = deque([self.root])
        while queue:
            node = queue.popleft()
            for child in self.children_of(node.tweet_id):
                if child.tweet_id not in out:
                    out[child.tweet_id] = out[node.tweet_id] + 1
                    queue.append(child)
        return out
