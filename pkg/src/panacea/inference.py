"""Stance inference: (premise, hypothesis) -> (contradiction, neutral, entailment).

The production NLI model is replaced by the adapter interface
:class:`NliProvider`. The built-in provider is a lexical stand-in: content
token overlap sets how much probability mass leaves "neutral", and the
parity of negation cues across the pair routes that mass to entailment or
contradiction. Orientation convention: the evidence/tweet is the premise,
the claim is the hypothesis.
"""

from __future__ import annotations

import json
import logging
import socket
from dataclasses import dataclass
from typing import Protocol, Sequence

from .assets_io import load_stopwords, read_asset
from .corpus.models import Stance
from .corpus.text import tokenize
from .errors import InvalidTriplet

logger = logging.getLogger(__name__)

PROB_FLOOR = 0.01
_SUM_TOLERANCE = 1e-6


@dataclass(frozen=True)
class NliTriplet:
    p_contradiction: float
    p_neutral: float
    p_entailment: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.p_contradiction, self.p_neutral, self.p_entailment)

    def validate(self) -> "NliTriplet":
        total = sum(self.as_tuple())
        if abs(total - 1.0) > _SUM_TOLERANCE or any(
                p < 0.0 or p != p for p in self.as_tuple()):
            raise InvalidTriplet(f"not a distribution: {self.as_tuple()}")
        return self


class NliProvider(Protocol):
    def infer(self, premise: str, hypothesis: str) -> NliTriplet: ...


_NEGATION_CUES: frozenset[str] | None = None
_STOPWORDS: frozenset[str] | None = None


def _cues() -> frozenset[str]:
    global _NEGATION_CUES
    if _NEGATION_CUES is None:
        _NEGATION_CUES = frozenset(read_asset("nli_negation_cues.txt"))
    return _NEGATION_CUES


def _stops() -> frozenset[str]:
    global _STOPWORDS
    if _STOPWORDS is None:
        _STOPWORDS = load_stopwords()
    return _STOPWORDS


def _negation_count(text: str) -> int:
    tokens = tokenize(text)
    count = sum(1 for tok in tokens if tok in _cues())
    # the tokenizer splits "don't" into don/t, so the n't cue is matched raw
    if "n't" in _cues():
        count += text.lower().count("n't")
    return count


def _content_tokens(text: str) -> set[str]:
    stops = _stops()
    return {tok for tok in tokenize(text) if tok not in stops}


def builtin_nli(premise: str, hypothesis: str) -> NliTriplet:
    """Lexical overlap + negation-parity triplet.

    o = |P & H| / |H| over content tokens; g = 1 when the pair carries an odd
    number of negation cues. Raw (contradiction, neutral, entailment) =
    (o*g, 1-o, o*(1-g)), floored at 0.01 and renormalized. The floor survives
    renormalization: floored entries stay at exactly 0.01 and the remaining
    mass is rescaled, so every emitted component is >= 0.01.
    """
    hyp = _content_tokens(hypothesis)
    overlap = 0.0
    if hyp:
        overlap = len(_content_tokens(premise) & hyp) / len(hyp)
    flipped = (_negation_count(premise) + _negation_count(hypothesis)) % 2
    contra = overlap * flipped
    entail = overlap * (1.0 - flipped)
    neutral = 1.0 - overlap
    raw = (contra, neutral, entail)
    low = [i for i, p in enumerate(raw) if p < PROB_FLOOR]
    remainder = 1.0 - PROB_FLOOR * len(low)
    high_mass = sum(p for i, p in enumerate(raw) if i not in low)
    out = [PROB_FLOOR if i in low else p * remainder / high_mass
           for i, p in enumerate(raw)]
    return NliTriplet(out[0], out[1], out[2])


class BuiltinNli:
    """Deterministic lexical provider; stateless and thread-safe."""

    def infer(self, premise: str, hypothesis: str) -> NliTriplet:
        return builtin_nli(premise, hypothesis)


class ExternalNliProvider:
    """Adapter to an external NLI service over a local TCP socket.

    One JSON line out ({"premise","hypothesis"}), one JSON line back with the
    three probabilities. Falls back to the built-in provider on any failure
    (logged with the reason).
    """

    def __init__(self, host: str = "127.0.0.1", port: int = 9876,
                 timeout: float = 2.0, fallback: NliProvider | None = None):
        self.host = host
        self.port = port
        self.timeout = timeout
        self.fallback = fallback or BuiltinNli()

    def infer(self, premise: str, hypothesis: str) -> NliTriplet:
        request = json.dumps({"premise": premise, "hypothesis": hypothesis}) + "\n"
        try:
            with socket.create_connection((self.host, self.port), timeout=self.timeout) as conn:
                conn.sendall(request.encode("utf-8"))
                with conn.makefile("r", encoding="utf-8") as fh:
                    line = fh.readline()
            payload = json.loads(line)
            triplet = NliTriplet(float(payload["contradiction"]),
                                 float(payload["neutral"]),
                                 float(payload["entailment"]))
            return triplet.validate()
        except (OSError, ValueError, KeyError, InvalidTriplet) as exc:
            logger.warning("external NLI failed (%s); using built-in", exc)
            return self.fallback.infer(premise, hypothesis)


# argmax mapping: contradiction -> Refute, neutral -> Neutral, entailment -> Support;
# ties resolve Refute > Support > Neutral
_TIE_ORDER = (
    (Stance.REFUTE, 0),
    (Stance.SUPPORT, 2),
    (Stance.NEUTRAL, 1),
)


def stance_of(triplet: NliTriplet) -> Stance:
    triplet.validate()
    probs = triplet.as_tuple()
    best = max(probs)
    for stance, idx in _TIE_ORDER:
        if probs[idx] == best:
            return stance
    raise AssertionError("unreachable")


def tweet_stances(claim: str, tweets: Sequence[str],
                  provider: NliProvider | None = None) -> list[Stance]:
    """Stance of each tweet toward the claim, input order preserved."""
    provider = provider or BuiltinNli()
    return [stance_of(provider.infer(tweet, claim)) for tweet in tweets]
