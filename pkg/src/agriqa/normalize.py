"""Deterministic cleanup of helpline call transcripts.

Transcripts arrive with fused tokens ("neemcake"), compact unit shorthands
("50kg", "5gmlit"), and inconsistent casing. :func:`normalize_text` applies
one fixed rule order:

1. split on whitespace/punctuation boundaries, keeping punctuation tokens
   (digit-letter junctions like "50kg" split into "50", "kg");
2. expand unit shorthands via the unit lexicon ("kg" -> "kilograms");
3. expand known abbreviations ("govt" -> "government"; identity entries
   keep domain acronyms like "dap" lowercase);
4. expand number-adjacent rate blobs: a token that bisects into two unit
   shorthands becomes "<unit> per <unit>" ("5gmlit" -> "5 grams per litre");
5. apply compound splits ("neemcake" -> "neem cake");
6. fold case, except proper nouns on the whitelist.

The result joins tokens with single spaces and is idempotent. Unknown
tokens pass through unchanged; numbers are never altered.

Run-on detection (:func:`detect_runons`) is advisory: it flags rare tokens
that look like two frequent vocabulary words fused together, with a
suggested split, and never edits the corpus itself. :func:`apply_flags`
applies reviewer-accepted suggestions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from collections import Counter
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .tokenizer import boundary_split, tokenize


class RuleSetError(Exception):
    """Raised when a rule file or rule set violates its invariants."""


class FlagError(Exception):
    """Raised when accepted run-on flags cannot be applied (e.g. overlap)."""


def _is_number(token: str) -> bool:
    return token[:1].isdigit()


def _is_word(token: str) -> bool:
    return token[:1].isalpha()


@dataclass(frozen=True)
class NormalizationRuleSet:
    """Immutable lexicons driving :func:`normalize_text`."""

    unit_lexicon: dict[str, str]
    abbreviation_map: dict[str, str]
    compound_splits: dict[str, str]
    proper_nouns: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for name, lexicon in (
            ("unit_lexicon", self.unit_lexicon),
            ("abbreviation_map", self.abbreviation_map),
            ("compound_splits", self.compound_splits),
        ):
            for key, value in lexicon.items():
                if key != key.lower():
                    raise RuleSetError(f"{name} key {key!r} is not lowercase")
                if value != key and value.lower() == key:
                    raise RuleSetError(
                        f"{name} entry {key!r} -> {value!r} differs only by case"
                    )

    @property
    def unit_vocabulary(self) -> frozenset[str]:
        """Canonical unit words: lexicon expansions plus naive plural/singular."""
        vocab = set()
        for expansion in self.unit_lexicon.values():
            vocab.add(expansion)
            if expansion.endswith("s"):
                vocab.add(expansion[:-1])
            else:
                vocab.add(expansion + "s")
        return frozenset(vocab)

    def _rate_bisect(self, token: str) -> tuple[str, str] | None:
        # First split point (left to right) whose halves are both unit keys.
        for i in range(1, len(token)):
            left, right = token[:i], token[i:]
            if left in self.unit_lexicon and right in self.unit_lexicon:
                return self.unit_lexicon[left], self.unit_lexicon[right]
        return None


def _parse_tsv(path: Path) -> dict[str, str]:
    mapping: dict[str, str] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "\t" not in line:
            raise RuleSetError(f"{path.name}:{lineno}: expected 'key<TAB>expansion'")
        key, expansion = line.split("\t", 1)
        mapping[key.strip()] = expansion.strip()
    return mapping


def load_ruleset(directory: str | Path) -> NormalizationRuleSet:
    """Load units.tsv, abbreviations.tsv, compounds.tsv (+ optional
    propernouns.txt) from a rules directory."""
    directory = Path(directory)
    proper: dict[str, str] = {}
    whitelist = directory / "propernouns.txt"
    if whitelist.exists():
        for line in whitelist.read_text(encoding="utf-8").splitlines():
            word = line.strip()
            if word and not word.startswith("#"):
                proper[word.lower()] = word
    return NormalizationRuleSet(
        unit_lexicon=_parse_tsv(directory / "units.tsv"),
        abbreviation_map=_parse_tsv(directory / "abbreviations.tsv"),
        compound_splits=_parse_tsv(directory / "compounds.tsv"),
        proper_nouns=proper,
    )


def default_ruleset() -> NormalizationRuleSet:
    """The rule set shipped with the package."""
    data_dir = resources.files("agriqa") / "data"
    with resources.as_file(data_dir) as path:
        return load_ruleset(path)


def normalize_text(text: str, rules: NormalizationRuleSet) -> str:
    """Normalize one transcript string. Idempotent; see module docstring."""
    out: list[str] = []
    for token in boundary_split(text):
        if not _is_word(token):
            out.append(token)
            continue
        low = token.lower()
        if low in rules.unit_lexicon:
            out.append(rules.unit_lexicon[low])
            continue
        if low in rules.abbreviation_map:
            out.extend(rules.abbreviation_map[low].split())
            continue
        if out and _is_number(out[-1]):
            rate = rules._rate_bisect(low)
            if rate is not None:
                out.extend((rate[0], "per", rate[1]))
                continue
        if low in rules.compound_splits:
            out.extend(rules.compound_splits[low].split())
            continue
        out.append(rules.proper_nouns.get(low, low))
    return " ".join(out)


@dataclass(frozen=True)
class QuantityToken:
    """A dose or rate: ``value unit`` with an optional per-unit ("per litre")."""

    value: float
    unit: str
    per_unit: str | None = None

    def __post_init__(self) -> None:
        if self.value < 0:
            raise ValueError("quantity value must be non-negative")


# Digit runs at least this long are treated as phone numbers, not doses.
PHONE_DIGIT_RUN = 7


def parse_quantities(
    text: str, rules: NormalizationRuleSet | None = None
) -> list[QuantityToken]:
    """Extract number+unit matches from normalized text.

    A quantity is a number token immediately followed by a canonical unit
    word, optionally followed by "per <unit>". Long digit runs (phone
    numbers) never match.
    """
    if rules is None:
        rules = default_ruleset()
    vocab = rules.unit_vocabulary
    tokens = tokenize(text)
    found: list[QuantityToken] = []
    for i, token in enumerate(tokens):
        if not _is_number(token):
            continue
        digits = token.replace(".", "")
        if len(digits) >= PHONE_DIGIT_RUN:
            continue
        if i + 1 >= len(tokens) or tokens[i + 1] not in vocab:
            continue
        per_unit = None
        if i + 3 < len(tokens) and tokens[i + 2] == "per" and tokens[i + 3] in vocab:
            per_unit = tokens[i + 3]
        found.append(QuantityToken(value=float(token), unit=tokens[i + 1], per_unit=per_unit))
    return found


@dataclass(frozen=True)
class RunOnFlag:
    """Advisory flag on one token occurrence that looks like a fused pair."""

    record_id: str
    token: str
    span: tuple[int, int]
    score: float
    suggested_split: str | None

    def to_json_dict(self) -> dict:
        return {
            "record_id": self.record_id,
            "token": self.token,
            "span": list(self.span),
            "score": self.score,
            "suggestion": self.suggested_split,
        }


def detect_runons(
    corpus: Iterable[tuple[str, str]],
    n: int = 2,
    threshold: float = 2.0,
    min_part_freq: int = 10,
) -> list[RunOnFlag]:
    """Flag rare tokens that bisect into two frequent vocabulary words.

    ``corpus`` yields (record_id, text) pairs. A token is flagged when its
    corpus frequency is <= ``threshold`` and some character bisection
    yields two words each seen at least ``min_part_freq`` times. The score
    is the geometric mean of the part frequencies over (1 + token
    frequency), so rarer fusions of commoner words rank first. Flags are
    ordered by descending score; the corpus is never modified.

    ``n`` bounds the fusion arity considered; only pairwise fusion is
    currently searched, so any 1 <= n <= 5 behaves alike apart from n == 1,
    which disables the search.
    TODO: segmentation of three-or-more-word fusions behind n >= 3.
    """
    if not 1 <= n <= 5:
        raise ValueError(f"n-gram order must be in 1..5, got {n}")
    entries = list(corpus)
    if not entries:
        raise ValueError("corpus must be non-empty")
    if n == 1:
        return []

    freq: Counter[str] = Counter()
    for _, text in entries:
        freq.update(tokenize(text))

    flags: list[RunOnFlag] = []
    for record_id, text in entries:
        for pos, token in enumerate(boundary_split(text)):
            if not _is_word(token):
                continue
            low = token.lower()
            if freq[low] > threshold:
                continue
            best: tuple[float, str] | None = None
            for i in range(1, len(low)):
                left, right = low[:i], low[i:]
                if freq[left] >= min_part_freq and freq[right] >= min_part_freq:
                    score = (freq[left] * freq[right]) ** 0.5 / (1.0 + freq[low])
                    if best is None or score > best[0]:
                        best = (score, f"{left} {right}")
            if best is not None:
                flags.append(
                    RunOnFlag(
                        record_id=record_id,
                        token=token,
                        span=(pos, pos + 1),
                        score=best[0],
                        suggested_split=best[1],
                    )
                )
    flags.sort(key=lambda f: (-f.score, f.record_id, f.span))
    return flags


def apply_flags(text: str, accepted_flags: Sequence[RunOnFlag]) -> str:
    """Apply accepted run-on suggestions to ``text``.

    Spans index the boundary-split tokens of ``text``. Flags are applied
    left to right; overlapping accepted flags are an error. With no flags
    the text is returned unchanged.
    """
    if not accepted_flags:
        return text
    tokens = boundary_split(text)
    ordered = sorted(accepted_flags, key=lambda f: f.span)
    last_end = 0
    for flag in ordered:
        start, end = flag.span
        if start < last_end:
            raise FlagError(f"overlapping flags at span {flag.span}")
        if not (0 <= start < end <= len(tokens)):
            raise FlagError(f"span {flag.span} outside tokenized text (len {len(tokens)})")
        last_end = end
    out: list[str] = []
    cursor = 0
    for flag in ordered:
        start, end = flag.span
        out.extend(tokens[cursor:start])
        out.append(flag.suggested_split or " ".join(tokens[start:end]))
        cursor = end
    out.extend(tokens[cursor:])
    return " ".join(out)


def write_flags(flags: Iterable[RunOnFlag], path: str | Path) -> int:
    """Export flags as JSON Lines for review."""
    path = Path(path)
    count = 0
    with path.open("w", encoding="utf-8") as fh:
        for flag in flags:
            fh.write(json.dumps(flag.to_json_dict(), ensure_ascii=False) + "\n")
            count += 1
    return count
