"""Loading of bundled versioned text assets."""

from __future__ import annotations

from importlib import resources


def read_asset(name: str) -> list[str]:
    """Non-comment, non-empty lines of a bundled asset file."""
    text = resources.files("panacea").joinpath("assets", name).read_text(encoding="utf-8")
    lines = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            lines.append(line)
    return lines


def load_stopwords() -> frozenset[str]:
    return frozenset(read_asset("stopwords.txt"))
