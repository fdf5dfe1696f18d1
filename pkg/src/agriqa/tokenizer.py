"""Shared tokenizers.

All overlap metrics (BLEU, ROUGE-1) and readability word counts use
:func:`tokenize`, so scores stay comparable across modules. The
normalization pipeline uses :func:`boundary_split`, which keeps
punctuation as tokens so text can be reassembled.
"""

from __future__ import annotations

import re

# A word token is a decimal number or a run of letters. Digit-letter
# junctions ("50kg") always split into two tokens.
_WORD_RE = re.compile(r"\d+(?:\.\d+)?|[^\W\d_]+")

# Everything tokenize() keeps, plus runs of other non-space characters
# (punctuation, including underscore), so boundary_split() loses nothing
# but whitespace.
_BOUNDARY_RE = re.compile(r"\d+(?:\.\d+)?|[^\W\d_]+|(?:[^\w\s]|_)+")


def tokenize(text: str) -> list[str]:
    """Lowercase word tokens: numbers kept intact, punctuation dropped."""
    return _WORD_RE.findall(text.lower())


def boundary_split(text: str) -> list[str]:
    """Case-preserving tokens including punctuation runs.

    ``" ".join(boundary_split(t))`` is idempotent: splitting the joined
    string again yields the same token list.
    """
    return _BOUNDARY_RE.findall(text)
