"""Lexicon-based sentiment scoring.

Reduced rule set: token valences from the bundled lexicon, sign flip when a
negation cue appears within the 3 preceding tokens, +-0.293 per booster word
adjacent to a scored token, and s/sqrt(s^2+15) normalization into [-1, 1].
No emoji, punctuation-amplification, or all-caps handling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

from ..assets_io import read_asset
from ..corpus.text import tokenize

BOOSTER_INCREMENT = 0.293
NORM_ALPHA = 15.0
NEGATION_WINDOW = 3
POSITIVE_THRESHOLD = 0.05
NEGATIVE_THRESHOLD = -0.05


class SentimentLabel(str, Enum):
    NEGATIVE = "Negative"
    NEUTRAL = "Neutral"
    POSITIVE = "Positive"


@dataclass(frozen=True)
class SentimentScore:
    compound: float
    label: SentimentLabel


@dataclass(frozen=True)
class SentimentLexicon:
    valences: dict
    negations: frozenset
    boosters: frozenset

    @staticmethod
    @lru_cache(maxsize=1)
    def bundled() -> "SentimentLexicon":
        valences = {}
        for line in read_asset("sentiment_lexicon.txt"):
            word, value = line.split("\t")
            valences[word] = float(value)
        return SentimentLexicon(
            valences=valences,
            negations=frozenset(read_asset("sentiment_negations.txt")),
            boosters=frozenset(read_asset("sentiment_boosters.txt")),
        )

    def mirrored(self) -> "SentimentLexicon":
        """Same lexicon with every valence negated (used by the oddness property)."""
        return SentimentLexicon(
            valences={w: -v for w, v in self.valences.items()},
            negations=self.negations, boosters=self.boosters,
        )


def label_for(compound: float) -> SentimentLabel:
    if compound <= NEGATIVE_THRESHOLD:
        return SentimentLabel.NEGATIVE
    if compound >= POSITIVE_THRESHOLD:
        return SentimentLabel.POSITIVE
    return SentimentLabel.NEUTRAL


def sentiment(text: str, lexicon: SentimentLexicon | None = None) -> SentimentScore:
    lexicon = lexicon or SentimentLexicon.bundled()
    tokens = tokenize(text)
    total = 0.0
    for i, token in enumerate(tokens):
        valence = lexicon.valences.get(token)
        if valence is None:
            continue
        contribution = valence
        for j in (i - 1, i + 1):
            if 0 <= j < len(tokens) and tokens[j] in lexicon.boosters:
                contribution += BOOSTER_INCREMENT if valence > 0 else -BOOSTER_INCREMENT
        window = range(max(0, i - NEGATION_WINDOW), i)
        if any(tokens[j] in lexicon.negations for j in window):
            contribution = -contribution
        total += contribution
    compound = total / math.sqrt(total * total + NORM_ALPHA)
    compound = max(-1.0, min(1.0, compound))
    return SentimentScore(compound=compound, label=label_for(compound))
