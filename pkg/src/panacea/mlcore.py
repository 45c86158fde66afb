"""Shared numeric machinery for the two classifiers.

Everything runs in double precision at desk scale so finite-difference
gradient checks stay meaningful.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8

ParamDict = dict[str, np.ndarray]
# loss_and_grads(params) -> (loss, grads); grads may be None when only the
# value is needed (finite differences).
LossFn = Callable[[ParamDict], tuple[float, ParamDict | None]]


def glorot(shape: tuple[int, ...], rng: np.random.Generator) -> np.ndarray:
    """Uniform in +-sqrt(6/(fan_in+fan_out))."""
    fan_in, fan_out = shape[0], shape[-1]
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=shape).astype(np.float64)


def softmax(x: np.ndarray, axis: int = -1) -> np.ndarray:
    shifted = x - np.max(x, axis=axis, keepdims=True)
    e = np.exp(shifted)
    return e / np.sum(e, axis=axis, keepdims=True)


def cross_entropy(probs: np.ndarray, label: int) -> float:
    return float(-np.log(max(probs[label], 1e-300)))


class Adam:
    """Per-parameter adaptive steps; state keyed by parameter name."""

    def __init__(self, lr: float = 1e-3, beta1: float = ADAM_BETA1,
                 beta2: float = ADAM_BETA2, eps: float = ADAM_EPS):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self._m: ParamDict = {}
        self._v: ParamDict = {}

    def step(self, params: ParamDict, grads: ParamDict) -> None:
        self.t += 1
        for name, g in grads.items():
            p = params[name]
            m = self._m.setdefault(name, np.zeros_like(p))
            v = self._v.setdefault(name, np.zeros_like(p))
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            m_hat = m / (1.0 - self.beta1 ** self.t)
            v_hat = v / (1.0 - self.beta2 ** self.t)
            p -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


def gradient_check(loss_fn: LossFn, params: ParamDict, n_coords: int = 100,
                   h: float = 1e-5, seed: int = 0) -> float:
    """Max relative error between analytic and central-difference gradients.

    Samples n_coords coordinates uniformly across all parameter arrays
    (every array gets at least one draw). relative error =
    |g_a - g_n| / max(1e-8, |g_a| + |g_n|).
    """
    rng = np.random.default_rng(seed)
    _, grads = loss_fn(params)
    assert grads is not None
    names = sorted(params)
    sizes = np.array([params[n].size for n in names])
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    total = int(offsets[-1])

    draws = set()
    for i, name in enumerate(names):
        draws.add(int(offsets[i]) + int(rng.integers(params[name].size)))
    while len(draws) < min(n_coords, total):
        draws.add(int(rng.integers(total)))

    worst = 0.0
    for flat in sorted(draws):
        slot = int(np.searchsorted(offsets, flat, side="right") - 1)
        name = names[slot]
        local = flat - int(offsets[slot])
        array = params[name]
        orig = array.flat[local]

        array.flat[local] = orig + h
        up, _ = loss_fn(params)
        array.flat[local] = orig - h
        down, _ = loss_fn(params)
        array.flat[local] = orig

        numeric = (up - down) / (2.0 * h)
        analytic = grads[name].flat[local]
        err = abs(analytic - numeric) / max(1e-8, abs(analytic) + abs(numeric))
        worst = max(worst, err)
    return worst
