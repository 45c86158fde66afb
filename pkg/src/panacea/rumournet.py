"""Rumour classification over propagation trees.

Two graph-convolution stacks run over the same tree: one along parent->child
edges (propagation) and one along child->parent edges (dispersion). Each
stack is two layers with the root's raw features concatenated to every node
before layer 2; mean-pooled layer outputs from both directions feed a linear
classifier. DropEdge regularizes training only.

Adjacency normalization is row-stochastic D^-1 (A + I): the directed tree
edges make symmetric normalization ill-posed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .checkpoint import expect_shape, load_checkpoint, save_checkpoint
from .corpus.models import LabelProvenance, PropagationTree, RumourLabel
from .errors import (
    BadCheckpoint,
    EmptyDataset,
    InvalidRate,
    InvalidTree,
    NoTrees,
    ShapeMismatch,
)
from .mlcore import Adam, cross_entropy, glorot, gradient_check, softmax
from .retrieval.encoder import Encoder

DEFAULT_H1 = 32
DEFAULT_H2 = 32
DEFAULT_DROPEDGE = 0.2

# class 0 is always NonRumour; the rumour score is 1 - p(NonRumour)
CLASS_NONRUMOUR = 0


@dataclass
class TreeGraph:
    X: np.ndarray        # n x d node features, breadth-first from the root
    A_td: np.ndarray     # n x n, entry (parent, child) = 1
    root_index: int
    node_ids: list[str]

    @property
    def n(self) -> int:
        return self.X.shape[0]


@dataclass
class TreeScore:
    tree_id: str
    r: float             # probability of the Rumour side
    n: int               # tree size


@dataclass
class BigcnParams:
    W1_td: np.ndarray    # d x h1
    W2_td: np.ndarray    # (h1 + d) x h2
    W1_bu: np.ndarray
    W2_bu: np.ndarray
    W_c: np.ndarray      # 2*(h2 + h1) x C
    b_c: np.ndarray      # C
    d: int
    h1: int
    h2: int
    C: int
    dropedge_rate: float = DEFAULT_DROPEDGE

    @classmethod
    def init(cls, d: int, h1: int = DEFAULT_H1, h2: int = DEFAULT_H2, C: int = 2,
             dropedge_rate: float = DEFAULT_DROPEDGE, seed: int = 0) -> "BigcnParams":
        rng = np.random.default_rng(seed)
        return cls(
            W1_td=glorot((d, h1), rng), W2_td=glorot((h1 + d, h2), rng),
            W1_bu=glorot((d, h1), rng), W2_bu=glorot((h1 + d, h2), rng),
            W_c=glorot((2 * (h2 + h1), C), rng), b_c=np.zeros(C),
            d=d, h1=h1, h2=h2, C=C, dropedge_rate=dropedge_rate,
        )

    def arrays(self) -> dict[str, np.ndarray]:
        return {"W1_td": self.W1_td, "W2_td": self.W2_td,
                "W1_bu": self.W1_bu, "W2_bu": self.W2_bu,
                "W_c": self.W_c, "b_c": self.b_c}

    def save(self, path, binary: bool = False) -> None:
        header = {"d": self.d, "h1": self.h1, "h2": self.h2, "C": self.C,
                  "dropedge_rate": self.dropedge_rate}
        save_checkpoint(path, "bigcn", header, self.arrays(), binary=binary)

    @classmethod
    def load(cls, path) -> "BigcnParams":
        kind, header, arrays = load_checkpoint(path)
        if kind != "bigcn":
            raise BadCheckpoint(f"expected bigcn checkpoint, got {kind}")
        d, h1, h2, C = (header[k] for k in ("d", "h1", "h2", "C"))
        return cls(
            W1_td=expect_shape(arrays, "W1_td", (d, h1)),
            W2_td=expect_shape(arrays, "W2_td", (h1 + d, h2)),
            W1_bu=expect_shape(arrays, "W1_bu", (d, h1)),
            W2_bu=expect_shape(arrays, "W2_bu", (h1 + d, h2)),
            W_c=expect_shape(arrays, "W_c", (2 * (h2 + h1), C)),
            b_c=expect_shape(arrays, "b_c", (C,)),
            d=d, h1=h1, h2=h2, C=C,
            dropedge_rate=header.get("dropedge_rate", DEFAULT_DROPEDGE),
        )


def build_tree_graph(tree: PropagationTree, encoder: Encoder) -> TreeGraph:
    """Feature matrix and parent->child adjacency in breadth-first node order."""
    try:
        ordered = list(tree.bfs_nodes())
    except ValueError as exc:
        raise InvalidTree(str(exc)) from exc
    if len(ordered) != tree.size:
        raise InvalidTree(f"tree {tree.tree_id}: not all nodes reachable from root")
    slot = {node.tweet_id: i for i, node in enumerate(ordered)}
    n = len(ordered)
    X = np.zeros((n, encoder.dim), dtype=np.float64)
    A = np.zeros((n, n), dtype=np.float64)
    for i, node in enumerate(ordered):
        X[i] = encoder.encode(node.text)
        if node.parent_id is not None:
            A[slot[node.parent_id], i] = 1.0
    return TreeGraph(X=X, A_td=A, root_index=slot[ordered[0].tweet_id],
                     node_ids=[node.tweet_id for node in ordered])


def normalize_adjacency(A: np.ndarray) -> np.ndarray:
    """Row-stochastic D^-1 (A + I); rows always sum to 1 thanks to the +I."""
    n = A.shape[0]
    augmented = A + np.eye(n)
    return augmented / augmented.sum(axis=1, keepdims=True)


def drop_edge(A: np.ndarray, p: float, seed: int | None = None,
              rng: np.random.Generator | None = None) -> np.ndarray:
    """Each edge independently removed with probability p; seeded, so deterministic."""
    if not 0.0 <= p <= 1.0:
        raise InvalidRate(f"dropedge rate {p} outside [0, 1]")
    if rng is None:
        rng = np.random.default_rng(seed)
    out = A.copy()
    edges = np.argwhere(A != 0.0)
    if len(edges) == 0 or p == 0.0:
        return out
    drops = rng.random(len(edges)) < p
    for (i, j), dropped in zip(edges, drops):
        if dropped:
            out[i, j] = 0.0
    return out


def _direction_forward(X, A, root_index, W1, W2):
    A_hat = normalize_adjacency(A)
    AX = A_hat @ X
    Z1 = AX @ W1
    H1 = np.maximum(Z1, 0.0)
    root_prev = X[root_index]
    H1r = np.concatenate([H1, np.tile(root_prev, (X.shape[0], 1))], axis=1)
    AH = A_hat @ H1r
    Z2 = AH @ W2
    H2 = np.maximum(Z2, 0.0)
    pooled = np.concatenate([H2.mean(axis=0), H1.mean(axis=0)])
    cache = {"A_hat": A_hat, "AX": AX, "Z1": Z1, "H1": H1, "AH": AH, "Z2": Z2}
    return pooled, cache


def _forward(params: BigcnParams, graph: TreeGraph, training: bool,
             rng: np.random.Generator | None):
    if graph.X.shape[1] != params.d:
        raise ShapeMismatch(f"features dim {graph.X.shape[1]} vs params d={params.d}")
    A_td = graph.A_td
    A_bu = graph.A_td.T
    if training and params.dropedge_rate > 0.0:
        rng = rng or np.random.default_rng()
        A_td = drop_edge(A_td, params.dropedge_rate, rng=rng)
        A_bu = drop_edge(A_bu, params.dropedge_rate, rng=rng)
    pooled_td, cache_td = _direction_forward(
        graph.X, A_td, graph.root_index, params.W1_td, params.W2_td)
    pooled_bu, cache_bu = _direction_forward(
        graph.X, A_bu, graph.root_index, params.W1_bu, params.W2_bu)
    feature = np.concatenate([pooled_td, pooled_bu])
    logits = feature @ params.W_c + params.b_c
    probs = softmax(logits)
    return probs, {"td": cache_td, "bu": cache_bu, "feature": feature}


def bigcn_forward(params: BigcnParams, graph: TreeGraph, training: bool = False,
                  seed: int | None = None) -> tuple[np.ndarray, dict[str, np.ndarray]]:
    """Class probabilities and the per-direction pooled vectors."""
    rng = np.random.default_rng(seed) if training else None
    probs, cache = _forward(params, graph, training, rng)
    half = params.h2 + params.h1
    pooled = {"td": cache["feature"][:half], "bu": cache["feature"][half:]}
    return probs, pooled


def _direction_backward(dpooled, X, cache, W2, h1, h2):
    n = X.shape[0]
    dH2 = np.tile(dpooled[:h2] / n, (n, 1))
    dH1_pool = np.tile(dpooled[h2:] / n, (n, 1))
    dZ2 = dH2 * (cache["Z2"] > 0.0)
    dW2 = cache["AH"].T @ dZ2
    dH1r = cache["A_hat"].T @ dZ2 @ W2.T
    dH1 = dH1r[:, :h1] + dH1_pool
    dZ1 = dH1 * (cache["Z1"] > 0.0)
    dW1 = cache["AX"].T @ dZ1
    return dW1, dW2


def loss_and_grads(params: BigcnParams, graph: TreeGraph, label_idx: int,
                   training: bool = False, rng: np.random.Generator | None = None,
                   want_grads: bool = True) -> tuple[float, dict | None]:
    probs, cache = _forward(params, graph, training, rng)
    loss = cross_entropy(probs, label_idx)
    if not want_grads:
        return loss, None
    dlogits = probs.copy()
    dlogits[label_idx] -= 1.0
    feature = cache["feature"]
    dW_c = np.outer(feature, dlogits)
    db_c = dlogits
    dfeature = params.W_c @ dlogits
    half = params.h2 + params.h1
    dW1_td, dW2_td = _direction_backward(
        dfeature[:half], graph.X, cache["td"], params.W2_td, params.h1, params.h2)
    dW1_bu, dW2_bu = _direction_backward(
        dfeature[half:], graph.X, cache["bu"], params.W2_bu, params.h1, params.h2)
    grads = {"W1_td": dW1_td, "W2_td": dW2_td, "W1_bu": dW1_bu, "W2_bu": dW2_bu,
             "W_c": dW_c, "b_c": db_c}
    return loss, grads


def train_bigcn(params: BigcnParams, dataset: Sequence[tuple[TreeGraph, int]],
                epochs: int = 100, lr: float = 1e-3,
                seed: int = 0) -> tuple[BigcnParams, list[float]]:
    """Cross-entropy training with DropEdge; deterministic per seed.

    Warm-starting (the fine-tune path) is just calling this with loaded
    checkpoint parameters.
    """
    if not dataset:
        raise EmptyDataset("no labelled trees")
    rng = np.random.default_rng(seed)
    optimizer = Adam(lr=lr)
    arrays = params.arrays()
    curve: list[float] = []
    for _ in range(epochs):
        order = rng.permutation(len(dataset))
        total = 0.0
        for idx in order:
            graph, label_idx = dataset[idx]
            loss, grads = loss_and_grads(params, graph, label_idx,
                                         training=True, rng=rng)
            optimizer.step(arrays, grads)
            total += loss
        curve.append(total / len(dataset))
    return params, curve


def score_tree(params: BigcnParams, tree: PropagationTree,
               encoder: Encoder) -> TreeScore:
    """Rumour probability for one tree (inference path, no DropEdge)."""
    graph = build_tree_graph(tree, encoder)
    probs, _ = bigcn_forward(params, graph, training=False)
    return TreeScore(tree_id=tree.tree_id, r=float(1.0 - probs[CLASS_NONRUMOUR]),
                     n=tree.size)


def aggregate_rumour(scores: Sequence[TreeScore]) -> float:
    """Size-weighted mean of per-tree rumour probabilities."""
    if not scores:
        raise NoTrees("no tree scores to aggregate")
    weighted = sum(s.n * s.r for s in scores)
    total = sum(s.n for s in scores)
    return weighted / total


def pseudo_label_trees(params: BigcnParams, trees: Sequence[PropagationTree],
                       encoder: Encoder, threshold: float = 0.5) -> list[PropagationTree]:
    """Label unannotated trees from the model; annotated labels are never touched."""
    out = []
    for tree in trees:
        if tree.rumour_provenance is LabelProvenance.ANNOTATED:
            out.append(tree)
            continue
        score = score_tree(params, tree, encoder)
        tree.rumour_prob = score.r
        tree.rumour_label = (RumourLabel.RUMOUR if score.r >= threshold
                             else RumourLabel.NON_RUMOUR)
        tree.rumour_provenance = LabelProvenance.PSEUDO
        out.append(tree)
    return out


def evaluate_cross_dataset(params: BigcnParams,
                           dataset: Sequence[tuple[TreeGraph, int]],
                           train_set: str = "", test_set: str = "") -> dict:
    """Accuracy plus per-class precision/recall of params on a labelled set."""
    if not dataset:
        raise EmptyDataset("no evaluation trees")
    confusion: dict[tuple[int, int], int] = {}
    hits = 0
    for graph, label_idx in dataset:
        probs, _ = bigcn_forward(params, graph, training=False)
        pred = int(np.argmax(probs))
        hits += int(pred == label_idx)
        confusion[(label_idx, pred)] = confusion.get((label_idx, pred), 0) + 1
    classes = sorted({c for pair in confusion for c in pair} | set(range(params.C)))
    per_class = {}
    for c in classes:
        tp = confusion.get((c, c), 0)
        fp = sum(v for (t, p), v in confusion.items() if p == c and t != c)
        fn = sum(v for (t, p), v in confusion.items() if t == c and p != c)
        per_class[c] = {
            "precision": tp / (tp + fp) if tp + fp else 0.0,
            "recall": tp / (tp + fn) if tp + fn else 0.0,
        }
    return {
        "train_set": train_set,
        "test_set": test_set,
        "accuracy": hits / len(dataset),
        "per_class": per_class,
        "count": len(dataset),
    }


def prepare_dataset(labelled_trees: Sequence[tuple[PropagationTree, int]],
                    encoder: Encoder) -> list[tuple[TreeGraph, int]]:
    return [(build_tree_graph(tree, encoder), label) for tree, label in labelled_trees]
