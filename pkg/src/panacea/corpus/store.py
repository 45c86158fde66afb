"""File-backed store for documents, paragraphs, claims, and propagation trees.

Persistence is append-only JSON-lines files under a data directory; the
in-memory index is rebuilt on open. Concurrent readers are fine; writes are
serialized by a per-store lock. No cross-process locking is attempted.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from ..errors import DuplicateId, MalformedRecord, OrphanNode
from .models import (
    Claim,
    ClaimLabel,
    Document,
    LabelProvenance,
    Location,
    Paragraph,
    PropagationTree,
    RumourLabel,
    Stance,
    TweetNode,
)
from .text import chunk_document

DOCUMENTS_FILE = "documents.jsonl"
PARAGRAPHS_FILE = "paragraphs.jsonl"
CLAIMS_FILE = "claims.jsonl"
TREES_FILE = "trees.jsonl"
TREE_META_FILE = "tree_meta.jsonl"


@dataclass
class TreeReport:
    """Validation findings for one propagation tree. Empty lists mean clean."""
    tree_id: str
    multi_root: list[str] = field(default_factory=list)
    no_root: bool = False
    cycles: list[str] = field(default_factory=list)          # unreachable nodes
    orphans: list[str] = field(default_factory=list)         # parent missing
    duplicate_ids: list[str] = field(default_factory=list)
    time_anomalies: list[str] = field(default_factory=list)  # child earlier than parent

    @property
    def clean(self) -> bool:
        return not (self.multi_root or self.no_root or self.cycles
                    or self.orphans or self.duplicate_ids)

    @property
    def structurally_valid(self) -> bool:
        """Clean except possibly for time-order anomalies (real data is messy)."""
        return self.clean


def validate_tree(tree: PropagationTree) -> TreeReport:
    """Pure structural check: roots, reachability, orphans, time order."""
    report = TreeReport(tree_id=tree.tree_id)
    nodes = tree.nodes
    roots = [n.tweet_id for n in nodes.values() if n.parent_id is None]
    if not roots:
        report.no_root = True
    elif len(roots) > 1:
        report.multi_root = sorted(roots)

    for node in nodes.values():
        if node.parent_id is not None and node.parent_id not in nodes:
            report.orphans.append(node.tweet_id)
    report.orphans.sort()

    if len(roots) == 1 and not report.orphans:
        reachable = {roots[0]}
        frontier = [roots[0]]
        children: dict[str, list[str]] = {}
        for node in nodes.values():
            if node.parent_id is not None:
                children.setdefault(node.parent_id, []).append(node.tweet_id)
        while frontier:
            nxt = []
            for tid in frontier:
                for child in children.get(tid, ()):
                    if child not in reachable:
                        reachable.add(child)
                        nxt.append(child)
            frontier = nxt
        report.cycles = sorted(set(nodes) - reachable)

        for node in nodes.values():
            if node.parent_id in nodes:
                parent = nodes[node.parent_id]
                if node.post_time and parent.post_time and node.post_time < parent.post_time:
                    report.time_anomalies.append(node.tweet_id)
        report.time_anomalies.sort()
    return report


def _require(record: dict, fields: Iterable[str], line_no: int) -> None:
    for name in fields:
        if name not in record or record[name] in (None, ""):
            raise MalformedRecord(line_no, f"missing field {name!r}")


def _parse_location(value) -> Location:
    if value is None or value == "":
        return None
    if isinstance(value, str):
        return value
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return (float(value[0]), float(value[1]))
    raise ValueError(f"unparseable location: {value!r}")


def _location_json(loc: Location):
    if loc is None:
        return None
    if isinstance(loc, str):
        return loc
    return [loc[0], loc[1]]


class CorpusStore:
    """Documents, 300-token paragraphs, claims, and trees in one directory."""

    def __init__(self, data_dir: str | Path, create: bool = True):
        self.data_dir = Path(data_dir)
        if create:
            self.data_dir.mkdir(parents=True, exist_ok=True)
        self._write_lock = threading.RLock()
        self.documents: dict[str, Document] = {}
        self.paragraphs: dict[str, Paragraph] = {}
        self.claims: dict[str, Claim] = {}
        self.trees: dict[str, PropagationTree] = {}
        self._claim_texts: dict[str, str] = {}  # lowercased text -> claim_id
        self._load()

    # --- loading ----------------------------------------------------------

    def _path(self, name: str) -> Path:
        return self.data_dir / name

    def _read_lines(self, name: str):
        path = self._path(name)
        if not path.exists():
            return
        with path.open("r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    yield line_no, json.loads(line)
                except json.JSONDecodeError as exc:
                    raise MalformedRecord(line_no, f"{name}: {exc.msg}") from exc

    def _load(self) -> None:
        for _, rec in self._read_lines(DOCUMENTS_FILE) or ():
            doc = Document(**rec)
            self.documents[doc.doc_id] = doc
        for _, rec in self._read_lines(PARAGRAPHS_FILE) or ():
            para = Paragraph(**rec)
            self.paragraphs[para.para_id] = para
        for _, rec in self._read_lines(CLAIMS_FILE) or ():
            claim = Claim(
                claim_id=rec["claim_id"], text=rec["text"],
                label=ClaimLabel(rec.get("label", "Unlabelled")),
                source=rec.get("source", ""), subtype=rec.get("subtype", ""),
            )
            self.claims[claim.claim_id] = claim
            self._claim_texts.setdefault(claim.text.strip().lower(), claim.claim_id)
        nodes_by_tree: dict[str, dict[str, TweetNode]] = {}
        for _, rec in self._read_lines(TREES_FILE) or ():
            node = TweetNode(
                tweet_id=rec["tweet_id"], parent_id=rec.get("parent_id"),
                user_id=rec.get("user_id", ""), post_time=rec.get("post_time", ""),
                text=rec.get("text", ""), location=_parse_location(rec.get("location")),
                retweet_count=int(rec.get("retweet_count", 0)),
            )
            nodes_by_tree.setdefault(rec["tree_id"], {})[node.tweet_id] = node
        for tree_id, nodes in nodes_by_tree.items():
            self.trees[tree_id] = PropagationTree(tree_id=tree_id, nodes=nodes)
        for _, rec in self._read_lines(TREE_META_FILE) or ():
            tree = self.trees.get(rec["tree_id"])
            if tree is None:
                continue
            tree.claim_ref = rec.get("claim_ref")
            tree.stance_label = Stance(rec["stance_label"]) if rec.get("stance_label") else None
            tree.rumour_label = RumourLabel(rec["rumour_label"]) if rec.get("rumour_label") else None
            tree.rumour_provenance = (LabelProvenance(rec["rumour_provenance"])
                                      if rec.get("rumour_provenance") else None)
            tree.rumour_prob = rec.get("rumour_prob")

    def _append(self, name: str, records: Iterable[dict]) -> None:
        with self._path(name).open("a", encoding="utf-8") as fh:
            for rec in records:
                fh.write(json.dumps(rec, ensure_ascii=False) + "\n")

    # --- documents ----------------------------------------------------------

    def ingest_documents(self, path: str | Path) -> tuple[int, int]:
        """Parse, chunk, and persist a documents file. Returns (docs, paragraphs)."""
        new_docs: list[Document] = []
        new_paras: list[Paragraph] = []
        seen_now: set[str] = set()
        with Path(path).open("r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise MalformedRecord(line_no, exc.msg) from exc
                _require(rec, ("doc_id", "body"), line_no)
                doc = Document(
                    doc_id=str(rec["doc_id"]), title=rec.get("title", ""),
                    body=rec["body"], source=rec.get("source", ""),
                    doc_type=rec.get("doc_type", ""), url=rec.get("url", ""),
                    date=rec.get("date", ""),
                )
                if doc.doc_id in self.documents or doc.doc_id in seen_now:
                    raise DuplicateId(doc.doc_id)
                seen_now.add(doc.doc_id)
                new_docs.append(doc)
                new_paras.extend(chunk_document(doc))
        with self._write_lock:
            self._append(DOCUMENTS_FILE, (vars(d) for d in new_docs))
            self._append(PARAGRAPHS_FILE, (vars(p) for p in new_paras))
            for doc in new_docs:
                self.documents[doc.doc_id] = doc
            for para in new_paras:
                self.paragraphs[para.para_id] = para
        return len(new_docs), len(new_paras)

    # --- claims ---------------------------------------------------------------

    def ingest_claims(self, path: str | Path) -> int:
        """Persist claims; duplicate texts (case-insensitive) collapse to the first."""
        new_claims: list[Claim] = []
        with Path(path).open("r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise MalformedRecord(line_no, exc.msg) from exc
                _require(rec, ("claim_id", "text"), line_no)
                label_raw = rec.get("label", "Unlabelled")
                try:
                    label = ClaimLabel(label_raw)
                except ValueError:
                    raise MalformedRecord(line_no, f"bad label {label_raw!r}")
                claim = Claim(
                    claim_id=str(rec["claim_id"]), text=rec["text"], label=label,
                    source=rec.get("source", ""), subtype=rec.get("subtype", ""),
                )
                key = claim.text.strip().lower()
                if key in self._claim_texts:
                    continue
                if claim.claim_id in self.claims:
                    raise DuplicateId(claim.claim_id)
                self._claim_texts[key] = claim.claim_id
                new_claims.append(claim)
        with self._write_lock:
            self._append(CLAIMS_FILE, (
                {"claim_id": c.claim_id, "text": c.text, "label": c.label.value,
                 "source": c.source, "subtype": c.subtype} for c in new_claims))
            for claim in new_claims:
                self.claims[claim.claim_id] = claim
        return len(new_claims)

    def claim_label_histogram(self) -> dict[str, int]:
        hist: dict[str, int] = {}
        for claim in self.claims.values():
            hist[claim.label.value] = hist.get(claim.label.value, 0) + 1
        return hist

    # --- trees ------------------------------------------------------------------

    def ingest_trees(self, path: str | Path, min_size: int = 5) -> tuple[int, int]:
        """Group node lines by tree, reject small/cyclic/multi-root trees.

        Raises MalformedRecord for unparseable lines or self-parent nodes,
        OrphanNode when a parent_id is absent from its tree. Structural
        rejections (size, cycles, multi-root) are counted, not raised.
        """
        groups: dict[str, dict[str, TweetNode]] = {}
        claim_refs: dict[str, Optional[str]] = {}
        stances: dict[str, Optional[str]] = {}
        with Path(path).open("r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise MalformedRecord(line_no, exc.msg) from exc
                _require(rec, ("tree_id", "tweet_id"), line_no)
                tweet_id = str(rec["tweet_id"])
                parent_id = rec.get("parent_id")
                parent_id = str(parent_id) if parent_id not in (None, "") else None
                if parent_id == tweet_id:
                    raise MalformedRecord(line_no, f"node {tweet_id} is its own parent")
                retweets = int(rec.get("retweet_count", 0))
                if retweets < 0:
                    raise MalformedRecord(line_no, "negative retweet_count")
                try:
                    location = _parse_location(rec.get("location"))
                except ValueError as exc:
                    raise MalformedRecord(line_no, str(exc)) from exc
                tree_id = str(rec["tree_id"])
                group = groups.setdefault(tree_id, {})
                if tweet_id in group:
                    raise MalformedRecord(line_no, f"duplicate tweet_id {tweet_id}")
                group[tweet_id] = TweetNode(
                    tweet_id=tweet_id, parent_id=parent_id,
                    user_id=str(rec.get("user_id", "")), post_time=rec.get("post_time", ""),
                    text=rec.get("text", ""), location=location, retweet_count=retweets,
                )
                if rec.get("claim_ref"):
                    claim_refs[tree_id] = str(rec["claim_ref"])
                if rec.get("stance_label"):
                    stances[tree_id] = rec["stance_label"]

        accepted: list[PropagationTree] = []
        rejected = 0
        for tree_id in sorted(groups):
            nodes = groups[tree_id]
            tree = PropagationTree(tree_id=tree_id, nodes=nodes)
            report = validate_tree(tree)
            if report.orphans:
                raise OrphanNode(report.orphans[0])
            if len(nodes) < min_size or not report.structurally_valid:
                rejected += 1
                continue
            if claim_refs.get(tree_id):
                tree.claim_ref = claim_refs[tree_id]
            if stances.get(tree_id):
                tree.stance_label = Stance(stances[tree_id])
            if tree_id in self.trees:
                raise DuplicateId(tree_id)
            accepted.append(tree)

        with self._write_lock:
            node_records = []
            meta_records = []
            for tree in accepted:
                for node in tree.bfs_nodes():
                    node_records.append({
                        "tree_id": tree.tree_id, "tweet_id": node.tweet_id,
                        "parent_id": node.parent_id, "user_id": node.user_id,
                        "post_time": node.post_time, "text": node.text,
                        "location": _location_json(node.location),
                        "retweet_count": node.retweet_count,
                    })
                if tree.claim_ref or tree.stance_label:
                    meta_records.append(self._meta_record(tree))
            self._append(TREES_FILE, node_records)
            if meta_records:
                self._append(TREE_META_FILE, meta_records)
            for tree in accepted:
                self.trees[tree.tree_id] = tree
        return len(accepted), rejected

    @staticmethod
    def _meta_record(tree: PropagationTree) -> dict:
        return {
            "tree_id": tree.tree_id,
            "claim_ref": tree.claim_ref,
            "stance_label": tree.stance_label.value if tree.stance_label else None,
            "rumour_label": tree.rumour_label.value if tree.rumour_label else None,
            "rumour_provenance": tree.rumour_provenance.value if tree.rumour_provenance else None,
            "rumour_prob": tree.rumour_prob,
        }

    def update_tree_meta(self, tree: PropagationTree) -> None:
        """Persist label/meta changes for a tree already in the store."""
        with self._write_lock:
            if tree.tree_id not in self.trees:
                raise KeyError(tree.tree_id)
            self.trees[tree.tree_id] = tree
            self._append(TREE_META_FILE, [self._meta_record(tree)])

    def trees_by_claim(self) -> dict[str, list[PropagationTree]]:
        by_claim: dict[str, list[PropagationTree]] = {}
        for tree in self.trees.values():
            if tree.claim_ref:
                by_claim.setdefault(tree.claim_ref, []).append(tree)
        return by_claim

    # --- export (round-trip) ------------------------------------------------

    def export_documents(self, path: str | Path) -> int:
        with Path(path).open("w", encoding="utf-8") as fh:
            for doc_id in sorted(self.documents):
                fh.write(json.dumps(vars(self.documents[doc_id]), ensure_ascii=False) + "\n")
        return len(self.documents)

    def export_claims(self, path: str | Path) -> int:
        with Path(path).open("w", encoding="utf-8") as fh:
            for claim_id in sorted(self.claims):
                c = self.claims[claim_id]
                fh.write(json.dumps({
                    "claim_id": c.claim_id, "text": c.text, "label": c.label.value,
                    "source": c.source, "subtype": c.subtype}, ensure_ascii=False) + "\n")
        return len(self.claims)

    def tree_export(self, tree_id: str) -> dict:
        """JSON-able view of one tree with node list and depths."""
        tree = self.trees[tree_id]
        depths = tree.depths()
        return {
            "tree_id": tree.tree_id,
            "size": tree.size,
            "claim_ref": tree.claim_ref,
            "stance_label": tree.stance_label.value if tree.stance_label else None,
            "rumour_label": tree.rumour_label.value if tree.rumour_label else None,
            "rumour_provenance": tree.rumour_provenance.value if tree.rumour_provenance else None,
            "rumour_prob": tree.rumour_prob,
            "nodes": [{
                "tweet_id": n.tweet_id, "parent_id": n.parent_id,
                "user_id": n.user_id, "post_time": n.post_time, "text": n.text,
                "location": _location_json(n.location),
                "retweet_count": n.retweet_count,
                "depth": depths.get(n.tweet_id),
            } for n in tree.bfs_nodes()],
        }
