"""Attention-based veracity classifier.

Each claim-evidence pair contributes a dense pair representation (mapped to
Key and Value) and an NLI stance triplet (mapped to Query). Cross-pair
attention outputs are concatenated in slot order and fed to a one-hidden-layer
MLP with a 2-way softmax head. Slots beyond the real evidence count are hard
masked: they receive exactly zero attention weight and emit exactly zero
output, so padded contents can never influence the verdict.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .checkpoint import expect_shape, load_checkpoint, save_checkpoint
from .corpus.models import ClaimLabel
from .errors import BadCheckpoint, EmptyDataset, NoEvidence, ShapeMismatch
from .inference import BuiltinNli, NliProvider
from .mlcore import Adam, cross_entropy, glorot, gradient_check, softmax
from .retrieval.encoder import Encoder

PAIR_SEPARATOR = " ||| "
DEFAULT_H = 16
DEFAULT_M = 32
DEFAULT_SLOTS = 10
PAD_TRIPLET = (0.0, 1.0, 0.0)

# class order in logits / probabilities
CLASS_FALSE, CLASS_TRUE = 0, 1


@dataclass
class NlisanParams:
    W_Q: np.ndarray   # 3 x h
    W_K: np.ndarray   # d x h
    W_V: np.ndarray   # d x h
    W1: np.ndarray    # N*h x m
    b1: np.ndarray    # m
    W2: np.ndarray    # m x 2
    b2: np.ndarray    # 2
    d: int
    h: int
    N: int
    m: int

    @classmethod
    def init(cls, d: int = 64, h: int = DEFAULT_H, N: int = DEFAULT_SLOTS,
             m: int = DEFAULT_M, seed: int = 0) -> "NlisanParams":
        rng = np.random.default_rng(seed)
        return cls(
            W_Q=glorot((3, h), rng), W_K=glorot((d, h), rng), W_V=glorot((d, h), rng),
            W1=glorot((N * h, m), rng), b1=np.zeros(m), W2=glorot((m, 2), rng),
            b2=np.zeros(2), d=d, h=h, N=N, m=m,
        )

    def arrays(self) -> dict[str, np.ndarray]:
        return {"W_Q": self.W_Q, "W_K": self.W_K, "W_V": self.W_V,
                "W1": self.W1, "b1": self.b1, "W2": self.W2, "b2": self.b2}

    def copy(self) -> "NlisanParams":
        return NlisanParams(**{k: v.copy() for k, v in self.arrays().items()},
                            d=self.d, h=self.h, N=self.N, m=self.m)

    def save(self, path, binary: bool = False) -> None:
        header = {"d": self.d, "h": self.h, "N": self.N, "m": self.m}
        save_checkpoint(path, "nlisan", header, self.arrays(), binary=binary)

    @classmethod
    def load(cls, path) -> "NlisanParams":
        kind, header, arrays = load_checkpoint(path)
        if kind != "nlisan":
            raise BadCheckpoint(f"expected nlisan checkpoint, got {kind}")
        d, h, N, m = (header[k] for k in ("d", "h", "N", "m"))
        return cls(
            W_Q=expect_shape(arrays, "W_Q", (3, h)),
            W_K=expect_shape(arrays, "W_K", (d, h)),
            W_V=expect_shape(arrays, "W_V", (d, h)),
            W1=expect_shape(arrays, "W1", (N * h, m)),
            b1=expect_shape(arrays, "b1", (m,)),
            W2=expect_shape(arrays, "W2", (m, 2)),
            b2=expect_shape(arrays, "b2", (2,)),
            d=d, h=h, N=N, m=m,
        )


@dataclass
class VeracityResult:
    label: ClaimLabel
    p_true: float
    attention: np.ndarray  # present x present, rows sum to 1

    def to_json(self) -> dict:
        return {"label": self.label.value, "p_true": self.p_true,
                "attention": self.attention.tolist()}


def _evidence_items(evidences: Sequence) -> list[tuple[str, float]]:
    """(text, relevance) pairs; bare strings keep their given order."""
    items = []
    for i, ev in enumerate(evidences):
        if isinstance(ev, str):
            items.append((ev, -float(i)))
        else:
            items.append((ev.text, float(ev.relevance)))
    return items


def assemble_inputs(claim: str, evidences: Sequence, encoder: Encoder,
                    nli: NliProvider | None = None,
                    n_slots: int = DEFAULT_SLOTS) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pair tensors S (n_slots x d), triplets I (n_slots x 3), presence mask.

    Evidence beyond n_slots is truncated keeping the highest-relevance items;
    padded slots carry zero S and the neutral triplet.
    """
    if not evidences:
        raise NoEvidence("no evidence for claim")
    nli = nli or BuiltinNli()
    items = _evidence_items(evidences)
    if len(items) > n_slots:
        order = sorted(range(len(items)), key=lambda i: (-items[i][1], i))
        items = [items[i] for i in sorted(order[:n_slots])]
    S = np.zeros((n_slots, encoder.dim), dtype=np.float64)
    I = np.tile(np.array(PAD_TRIPLET), (n_slots, 1))
    mask = np.zeros(n_slots, dtype=bool)
    for slot, (text, _) in enumerate(items):
        S[slot] = encoder.encode(claim + PAIR_SEPARATOR + text)
        I[slot] = nli.infer(text, claim).as_tuple()
        mask[slot] = True
    return S, I, mask


def attention_forward(params: NlisanParams, S: np.ndarray, I: np.ndarray,
                      mask: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Concatenated attention outputs (N*h,) and present-slot weights."""
    _check_shapes(params, S, I, mask)
    present = np.flatnonzero(mask)
    Sp, Ip = S[present], I[present]
    Q = Ip @ params.W_Q
    K = Sp @ params.W_K
    V = Sp @ params.W_V
    logits = Q @ K.T / np.sqrt(params.h)
    attn = softmax(logits, axis=1)
    O = np.zeros((params.N, params.h), dtype=np.float64)
    O[present] = attn @ V
    return O.reshape(-1), attn


def _check_shapes(params: NlisanParams, S: np.ndarray, I: np.ndarray,
                  mask: np.ndarray) -> None:
    if S.shape != (params.N, params.d) or I.shape != (params.N, 3) \
            or mask.shape != (params.N,):
        raise ShapeMismatch(
            f"S{S.shape} I{I.shape} mask{mask.shape} vs N={params.N}, d={params.d}")
    if not mask.any():
        raise NoEvidence("mask has no present slots")


def _forward(params: NlisanParams, S: np.ndarray, I: np.ndarray,
             mask: np.ndarray) -> tuple[np.ndarray, dict]:
    flat, attn = attention_forward(params, S, I, mask)
    z1 = flat @ params.W1 + params.b1
    hidden = np.maximum(z1, 0.0)
    logits = hidden @ params.W2 + params.b2
    probs = softmax(logits)
    cache = {"flat": flat, "attn": attn, "z1": z1, "hidden": hidden}
    return probs, cache


def classify(params: NlisanParams, claim: str, evidences: Sequence,
             encoder: Encoder, nli: NliProvider | None = None) -> VeracityResult:
    """Veracity verdict for a claim given its evidence list."""
    S, I, mask = assemble_inputs(claim, evidences, encoder, nli, n_slots=params.N)
    probs, cache = _forward(params, S, I, mask)
    p_true = float(probs[CLASS_TRUE])
    label = ClaimLabel.TRUE if p_true >= 0.5 else ClaimLabel.FALSE
    return VeracityResult(label=label, p_true=p_true, attention=cache["attn"])


def loss_and_grads(params: NlisanParams, S: np.ndarray, I: np.ndarray,
                   mask: np.ndarray, label_idx: int,
                   want_grads: bool = True) -> tuple[float, dict | None]:
    """Cross-entropy and analytic gradients for one instance."""
    probs, cache = _forward(params, S, I, mask)
    loss = cross_entropy(probs, label_idx)
    if not want_grads:
        return loss, None

    present = np.flatnonzero(mask)
    Sp, Ip = S[present], I[present]
    Q = Ip @ params.W_Q
    K = Sp @ params.W_K
    V = Sp @ params.W_V
    attn = cache["attn"]
    scale = 1.0 / np.sqrt(params.h)

    dlogits = probs.copy()
    dlogits[label_idx] -= 1.0
    dW2 = np.outer(cache["hidden"], dlogits)
    db2 = dlogits
    dhidden = params.W2 @ dlogits
    dz1 = dhidden * (cache["z1"] > 0.0)
    dW1 = np.outer(cache["flat"], dz1)
    db1 = dz1
    dflat = params.W1 @ dz1

    dO = dflat.reshape(params.N, params.h)[present]
    dV = attn.T @ dO
    dattn = dO @ V.T
    # softmax backward, row-wise
    dscores = attn * (dattn - np.sum(dattn * attn, axis=1, keepdims=True))
    dQ = dscores @ K * scale
    dK = dscores.T @ Q * scale
    grads = {
        "W_Q": Ip.T @ dQ,
        "W_K": Sp.T @ dK,
        "W_V": Sp.T @ dV,
        "W1": dW1, "b1": db1, "W2": dW2, "b2": db2,
    }
    return loss, grads


def _label_index(label) -> int:
    if isinstance(label, ClaimLabel):
        return CLASS_TRUE if label is ClaimLabel.TRUE else CLASS_FALSE
    if isinstance(label, str):
        return CLASS_TRUE if label.lower() == "true" else CLASS_FALSE
    return CLASS_TRUE if label else CLASS_FALSE


def train(params: NlisanParams, dataset: Sequence, encoder: Encoder,
          nli: NliProvider | None = None, epochs: int = 200, lr: float = 1e-3,
          seed: int = 0) -> tuple[NlisanParams, list[float]]:
    """Adam-driven cross-entropy training over (claim, evidences, label) rows.

    Deterministic given the seed; per-example updates in a seeded shuffle
    order. Returns the trained parameters and the per-epoch mean loss.
    """
    if not dataset:
        raise EmptyDataset("empty training set")
    nli = nli or BuiltinNli()
    tensors = []
    for claim, evidences, label in dataset:
        S, I, mask = assemble_inputs(claim, evidences, encoder, nli, n_slots=params.N)
        tensors.append((S, I, mask, _label_index(label)))

    rng = np.random.default_rng(seed)
    optimizer = Adam(lr=lr)
    arrays = params.arrays()
    curve: list[float] = []
    for _ in range(epochs):
        order = rng.permutation(len(tensors))
        total = 0.0
        for idx in order:
            S, I, mask, label_idx = tensors[idx]
            loss, grads = loss_and_grads(params, S, I, mask, label_idx)
            optimizer.step(arrays, grads)
            total += loss
        curve.append(total / len(tensors))
    return params, curve


def accuracy(params: NlisanParams, dataset: Sequence, encoder: Encoder,
             nli: NliProvider | None = None) -> float:
    nli = nli or BuiltinNli()
    hits = 0
    for claim, evidences, label in dataset:
        result = classify(params, claim, evidences, encoder, nli)
        hits += int(_label_index(result.label) == _label_index(label))
    return hits / len(dataset)


def check_gradients(params: NlisanParams, S: np.ndarray, I: np.ndarray,
                    mask: np.ndarray, label_idx: int, n_coords: int = 120,
                    h: float = 1e-5, seed: int = 0) -> float:
    """Max relative error of analytic vs central-difference gradients."""
    arrays = params.arrays()

    def loss_fn(arr):
        # arr aliases params' arrays; mutation by the checker is visible
        return loss_and_grads(params, S, I, mask, label_idx)

    return gradient_check(loss_fn, arrays, n_coords=n_coords, h=h, seed=seed)
