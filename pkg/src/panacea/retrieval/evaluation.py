"""Retrieval-quality evaluation: truncated average precision."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

from ..errors import NoQueries

DEFAULT_KS = (5, 10, 20, 100)


@dataclass
class JudgedQuery:
    query: str
    relevant: set[str]


def average_precision_at_k(ranking: Sequence[str], relevant_set: set[str], k: int) -> float:
    """AP truncated at rank k, normalized by min(|relevant|, k).

    Sums precision@i over the first k ranks that hold a relevant item; 0 when
    the relevant set is empty.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not relevant_set:
        return 0.0
    hits = 0
    precision_sum = 0.0
    for i, unit_id in enumerate(ranking[:k], start=1):
        if unit_id in relevant_set:
            hits += 1
            precision_sum += hits / i
    return precision_sum / min(len(relevant_set), k)


def evaluate_pipeline(queries: Iterable[JudgedQuery],
                      search: Callable[[str, int], Sequence[str]],
                      ks: Sequence[int] = DEFAULT_KS) -> dict[int, float]:
    """Mean AP@k across judged queries for each cutoff.

    ``search(query, k)`` returns the ranked unit ids of the pipeline under
    evaluation.
    """
    queries = list(queries)
    if not queries:
        raise NoQueries("no judged queries")
    totals = {k: 0.0 for k in ks}
    max_k = max(ks)
    for judged in queries:
        ranking = list(search(judged.query, max_k))
        for k in ks:
            totals[k] += average_precision_at_k(ranking, judged.relevant, k)
    return {k: totals[k] / len(queries) for k in ks}


def load_judged(path: str | Path) -> list[JudgedQuery]:
    """Judged-queries file: one JSON record per line with query + relevant ids."""
    out = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            out.append(JudgedQuery(query=rec["query"], relevant=set(rec["relevant"])))
    return out
