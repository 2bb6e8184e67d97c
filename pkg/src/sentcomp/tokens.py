"""Tokenization and the reserved sentence markers."""

from __future__ import annotations

import re
from typing import Sequence

START = "<s>"
END = "</s>"
MARKERS = frozenset((START, END))

_TOKEN_RE = re.compile(r"\w+(?:[-'’]\w+)*|[^\w\s]", re.UNICODE)

def tokenize(text: str) -> tuple[str, ...]:
    """Split on whitespace and punctuation; punctuation marks become tokens.

    >>> tokenize("The man saw the dog.")
    ('The', 'man', 'saw', 'the', 'dog', '.')
    """
    return tuple(_TOKEN_RE.findall(text))


def check_tokens(tokens: Sequence[str]) -> tuple[str, ...]:
    tokens = tuple(tokens)
    for tok in tokens:
        if tok in MARKERS:
            raise ValueError(f"reserved marker {tok!r} used as a word")
        if not tok or any(ch.isspace() for ch in tok):
            raise ValueError(f"invalid token {tok!r}")
    return tokens


def detokenize(tokens: Sequence[str]) -> str:
    out = ""
    for tok in tokens:
        if out and not re.fullmatch(r"[.,!?;:)\]}]", tok):
            out += " "
        out += tok
    return out
