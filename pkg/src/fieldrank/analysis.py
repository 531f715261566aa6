"""Text analysis shared by indexing and querying.

A token is a maximal run of Unicode alphanumeric characters, lowercased.
No stemming, no stopwords. The number of tokens in a field is that
field's length everywhere downstream.
"""

from __future__ import annotations

import re
from typing import NamedTuple

# [^\W_] == alphanumeric; \w alone would keep underscores.
_TOKEN_RE = re.compile(r"[^\W_]+")


class Token(NamedTuple):
    text: str
    position: int


def analyze(text: str) -> list[str]:
    """Return the normalized term strings of ``text`` in order."""
    # Lowercase before splitting: some characters lowercase into a
    # letter plus a combining mark, and splitting afterwards keeps the
    # result stable under re-tokenization.
    return _TOKEN_RE.findall(text.lower())


def tokenize(text: str) -> list[Token]:
    return [Token(t, i) for i, t in enumerate(analyze(text))]
