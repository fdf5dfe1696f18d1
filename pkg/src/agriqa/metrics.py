"""Generation-quality and readability metrics.

Implements the evaluation stack for answer generation: corpus-level BLEU,
ROUGE-1, BERTScore over externally supplied token embeddings, and three
readability indices (Flesch-Kincaid grade level, Coleman-Liau index,
Dale-Chall score). All token-overlap metrics and readability word counts
share :func:`agriqa.tokenizer.tokenize` so scores are comparable.

Aggregation over pairs is macro: precision and recall are averaged across
pairs and F1 is recomputed from those means, so every reported triple
satisfies f1 == 2PR/(P+R).
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .tokenizer import tokenize

MAX_NGRAM_ORDER = 4


class MetricsError(Exception):
    """Raised for unusable metric inputs: misaligned files, bad embeddings."""


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


@dataclass(frozen=True)
class TripleScore:
    """A precision/recall/F1 triple; F1 is always the harmonic mean."""

    precision: float
    recall: float
    f1: float

    def __post_init__(self) -> None:
        expected = _f1(self.precision, self.recall)
        if not math.isclose(self.f1, expected, rel_tol=0.0, abs_tol=1e-12):
            raise MetricsError(
                f"inconsistent triple: f1={self.f1} but 2PR/(P+R)={expected}"
            )

    @classmethod
    def from_pr(cls, precision: float, recall: float) -> "TripleScore":
        return cls(precision, recall, _f1(precision, recall))

    def to_json_dict(self) -> dict:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1}


@dataclass(frozen=True)
class ReadabilityScores:
    fkgl: float
    cli: float
    dcrs: float

    def to_json_dict(self) -> dict:
        return {"fkgl": self.fkgl, "cli": self.cli, "dcrs": self.dcrs}


@dataclass(frozen=True)
class MetricReport:
    """All metrics for one evaluation run over n_pairs candidate/reference pairs."""

    bleu: float
    rouge1: TripleScore
    bertscore: TripleScore | None
    readability: ReadabilityScores
    n_pairs: int
    bertscore_skipped: bool = False

    def to_json_dict(self) -> dict:
        return {
            "bleu": self.bleu,
            "rouge1": self.rouge1.to_json_dict(),
            "bertscore": self.bertscore.to_json_dict() if self.bertscore else None,
            "bertscore_skipped": self.bertscore_skipped,
            "readability": self.readability.to_json_dict(),
            "n_pairs": self.n_pairs,
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "MetricReport":
        bert = obj.get("bertscore")
        return cls(
            bleu=obj["bleu"],
            rouge1=TripleScore(**obj["rouge1"]),
            bertscore=TripleScore(**bert) if bert else None,
            readability=ReadabilityScores(**obj["readability"]),
            n_pairs=obj["n_pairs"],
            bertscore_skipped=obj.get("bertscore_skipped", False),
        )


# --------------------------------------------------------------------------
# BLEU
# --------------------------------------------------------------------------


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def modified_precisions(
    candidates: Sequence[str], references: Sequence[str]
) -> list[tuple[int, int]]:
    """Corpus-level clipped n-gram counts for n = 1..4.

    Returns (clipped_matches, candidate_ngram_total) per order, before any
    smoothing; this is the quantity an independent counting oracle can
    check exactly.
    """
    if len(candidates) != len(references):
        raise MetricsError(
            f"candidate/reference length mismatch: {len(candidates)} vs {len(references)}"
        )
    if not candidates:
        raise MetricsError("cannot score an empty candidate list")
    stats = []
    for n in range(1, MAX_NGRAM_ORDER + 1):
        matches = 0
        total = 0
        for cand, ref in zip(candidates, references):
            cand_counts = _ngrams(tokenize(cand), n)
            ref_counts = _ngrams(tokenize(ref), n)
            total += sum(cand_counts.values())
            matches += sum(
                min(count, ref_counts[gram]) for gram, count in cand_counts.items()
            )
        stats.append((matches, total))
    return stats


def bleu(candidates: Sequence[str], references: Sequence[str]) -> float:
    """Corpus BLEU-4: uniform-weight geometric mean of modified precisions
    times the brevity penalty.

    Zero precisions at order n >= 2 get add-one smoothing, (m+1)/(t+1);
    orders beyond the candidate length smooth to 1 and carry no signal. A
    zero unigram precision (or an empty tokenized candidate corpus) scores
    0 outright.
    """
    stats = modified_precisions(candidates, references)
    cand_len = sum(len(tokenize(c)) for c in candidates)
    ref_len = sum(len(tokenize(r)) for r in references)
    if cand_len == 0:
        return 0.0

    log_sum = 0.0
    for order, (matches, total) in enumerate(stats, start=1):
        if matches > 0:
            precision = matches / total
        elif order == 1:
            return 0.0
        else:
            precision = (matches + 1) / (total + 1)
        log_sum += math.log(precision)
    geo_mean = math.exp(log_sum / MAX_NGRAM_ORDER)
    brevity = 1.0 if cand_len >= ref_len else math.exp(1.0 - ref_len / cand_len)
    return brevity * geo_mean


# --------------------------------------------------------------------------
# ROUGE-1
# --------------------------------------------------------------------------


def rouge1(candidate: str, reference: str) -> TripleScore:
    """Unigram multiset overlap. Empty sides follow the all-zeros convention."""
    cand_counts = Counter(tokenize(candidate))
    ref_counts = Counter(tokenize(reference))
    overlap = sum((cand_counts & ref_counts).values())
    n_cand = sum(cand_counts.values())
    n_ref = sum(ref_counts.values())
    precision = overlap / n_cand if n_cand else 0.0
    recall = overlap / n_ref if n_ref else 0.0
    return TripleScore.from_pr(precision, recall)


# --------------------------------------------------------------------------
# BERTScore over provided embeddings
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TokenEmbeddings:
    """Tokens with one contextual vector each; vectors is (n_tokens, dim)."""

    tokens: tuple[str, ...]
    vectors: np.ndarray

    def __post_init__(self) -> None:
        vectors = np.asarray(self.vectors, dtype=float)
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if vectors.ndim != 2 or vectors.shape[0] != len(self.tokens):
            raise MetricsError(
                f"need one vector per token: {len(self.tokens)} tokens, "
                f"vector array shape {vectors.shape}"
            )
        if len(self.tokens) == 0:
            raise MetricsError("embeddings must cover at least one token")
        if np.isnan(vectors).any():
            raise MetricsError("embedding vectors contain NaN")

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])


def _unit_rows(vectors: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(vectors, axis=1)
    if (norms == 0).any():
        raise MetricsError("zero-norm embedding vector")
    return vectors / norms[:, None]


def bertscore(cand: TokenEmbeddings, ref: TokenEmbeddings) -> TripleScore:
    """Greedy-matching soft overlap on cosine similarity.

    Recall averages, over reference tokens, the best similarity to any
    candidate token; precision mirrors that over candidate tokens. No idf
    weighting and no baseline rescaling: scores are raw cosines in [-1, 1].
    """
    if cand.dim != ref.dim:
        raise MetricsError(f"embedding dimension mismatch: {cand.dim} vs {ref.dim}")
    sim = _unit_rows(cand.vectors) @ _unit_rows(ref.vectors).T
    precision = float(sim.max(axis=1).mean())
    recall = float(sim.max(axis=0).mean())
    return TripleScore.from_pr(precision, recall)


# --------------------------------------------------------------------------
# Readability
# --------------------------------------------------------------------------

_VOWELS = frozenset("aeiouy")
_SENTENCE_END_RE = re.compile(r"[.!?]+(?=\s|$)")


def count_syllables(word: str) -> int:
    """Vowel-group syllable heuristic, minimum 1.

    Counts maximal runs of aeiouy, then drops a terminal silent 'e' unless
    the word ends in consonant+"le" ("table" keeps both syllables).
    """
    w = word.lower()
    groups = 0
    in_group = False
    for ch in w:
        if ch in _VOWELS:
            if not in_group:
                groups += 1
            in_group = True
        else:
            in_group = False
    if w.endswith("e"):
        silent_le = w.endswith("le") and len(w) > 2 and w[-3] not in _VOWELS
        if not silent_le:
            groups -= 1
    return max(groups, 1)


def count_sentences(text: str) -> int:
    """Sentences end at '.', '!' or '?' before whitespace or end of text.
    Unterminated trailing words count as one more sentence; a text with no
    terminator at all is one sentence."""
    matches = list(_SENTENCE_END_RE.finditer(text))
    count = len(matches)
    tail = text[matches[-1].end() :] if matches else text
    if tokenize(tail):
        count += 1
    return max(count, 1)


@lru_cache(maxsize=1)
def familiar_words() -> frozenset[str]:
    """The packaged familiar-word list (see data/familiar_words.txt)."""
    text = (resources.files("agriqa") / "data" / "familiar_words.txt").read_text(
        encoding="utf-8"
    )
    return frozenset(
        line.strip() for line in text.splitlines() if line.strip() and not line.startswith("#")
    )


def is_difficult(token: str, familiar: frozenset[str] | None = None) -> bool:
    """A word is difficult when neither it nor its de-pluralized form is
    familiar. Numeric tokens are never difficult."""
    if not token[:1].isalpha():
        return False
    if familiar is None:
        familiar = familiar_words()
    low = token.lower()
    if low in familiar:
        return False
    return not (low.endswith("s") and low[:-1] in familiar)


@dataclass(frozen=True)
class ReadabilityInputs:
    """Raw counts feeding the readability formulas."""

    sentence_count: int
    word_count: int
    syllable_count: int
    letter_count: int
    difficult_word_count: int


def text_counts(text: str) -> ReadabilityInputs:
    """Count sentences, words, syllables, letters, and difficult words.

    Words are shared-tokenizer tokens. Letters are the alphanumeric
    characters of those tokens; numeric tokens count one syllable.
    """
    tokens = tokenize(text)
    if not tokens:
        raise MetricsError("readability needs at least one word")
    familiar = familiar_words()
    syllables = 0
    letters = 0
    difficult = 0
    for token in tokens:
        letters += sum(ch.isalnum() for ch in token)
        syllables += count_syllables(token) if token[:1].isalpha() else 1
        difficult += is_difficult(token, familiar)
    return ReadabilityInputs(
        sentence_count=count_sentences(text),
        word_count=len(tokens),
        syllable_count=syllables,
        letter_count=letters,
        difficult_word_count=difficult,
    )


# Dale-Chall adds this constant when more than 5% of words are difficult.
DALE_CHALL_PENALTY = 3.6365
DALE_CHALL_THRESHOLD = 0.05


def readability_from_counts(counts: ReadabilityInputs) -> ReadabilityScores:
    words = counts.word_count
    sentences = max(counts.sentence_count, 1)
    if words == 0:
        raise MetricsError("readability needs at least one word")
    fkgl = 0.39 * (words / sentences) + 11.8 * (counts.syllable_count / words) - 15.59
    letters_per_100 = 100.0 * counts.letter_count / words
    sentences_per_100 = 100.0 * sentences / words
    cli = 0.0588 * letters_per_100 - 0.296 * sentences_per_100 - 15.8
    difficult_frac = counts.difficult_word_count / words
    dcrs = 0.1579 * (100.0 * difficult_frac) + 0.0496 * (words / sentences)
    if difficult_frac > DALE_CHALL_THRESHOLD:
        dcrs += DALE_CHALL_PENALTY
    return ReadabilityScores(fkgl=fkgl, cli=cli, dcrs=dcrs)


def readability(text: str) -> ReadabilityScores:
    """FKGL / CLI / DCRS for one text (>= 1 word)."""
    return readability_from_counts(text_counts(text))


# --------------------------------------------------------------------------
# Pairwise evaluation
# --------------------------------------------------------------------------


def compute_report(
    candidates: Sequence[str],
    references: Sequence[str],
    embeddings: Sequence[tuple[TokenEmbeddings, TokenEmbeddings]] | None = None,
) -> MetricReport:
    """Aggregate all metrics over aligned candidate/reference pairs.

    BLEU is corpus-level; ROUGE-1 and BERTScore are macro-averaged (mean P
    and R, F1 recomputed). Readability is computed over the candidate
    texts concatenated with spaces. ``embeddings`` pairs align with the
    text pairs; None marks BERTScore as skipped.
    """
    if len(candidates) != len(references) or not candidates:
        raise MetricsError("need equal, non-zero numbers of candidates and references")
    rouge_p = [rouge1(c, r) for c, r in zip(candidates, references)]
    mean_p = sum(t.precision for t in rouge_p) / len(rouge_p)
    mean_r = sum(t.recall for t in rouge_p) / len(rouge_p)

    bert: TripleScore | None = None
    skipped = embeddings is None
    if embeddings is not None:
        if len(embeddings) != len(candidates):
            raise MetricsError(
                f"embeddings cover {len(embeddings)} pairs, texts {len(candidates)}"
            )
        triples = [bertscore(c, r) for c, r in embeddings]
        bert = TripleScore.from_pr(
            sum(t.precision for t in triples) / len(triples),
            sum(t.recall for t in triples) / len(triples),
        )

    return MetricReport(
        bleu=bleu(candidates, references),
        rouge1=TripleScore.from_pr(mean_p, mean_r),
        bertscore=bert,
        readability=readability(" ".join(candidates)),
        n_pairs=len(candidates),
        bertscore_skipped=skipped,
    )


def read_text_jsonl(path: str | Path) -> dict[str, str]:
    """Read a {id, text} JSONL file preserving order; duplicate ids error."""
    path = Path(path)
    if not path.exists():
        raise MetricsError(f"file not found: {path}")
    texts: dict[str, str] = {}
    with path.open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            rid = str(obj["id"])
            if rid in texts:
                raise MetricsError(f"duplicate id {rid!r} in {path}")
            texts[rid] = obj["text"]
    if not texts:
        raise MetricsError(f"no entries in {path}")
    return texts


def read_embedding_cache(
    path: str | Path,
) -> tuple[dict[str, TokenEmbeddings], dict[str, TokenEmbeddings]]:
    """Read the embedding cache: a JSON header line {"dim": D} followed by
    {id, side, tokens, vectors} lines; side is "prediction" or "reference".
    Returns (prediction_embeddings, reference_embeddings) keyed by id."""
    path = Path(path)
    if not path.exists():
        raise MetricsError(f"embedding cache not found: {path}")
    sides: dict[str, dict[str, TokenEmbeddings]] = {"prediction": {}, "reference": {}}
    with path.open(encoding="utf-8") as fh:
        header_line = fh.readline().strip()
        try:
            dim = int(json.loads(header_line)["dim"])
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise MetricsError(f"bad embedding cache header: {header_line!r}") from exc
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            side = obj.get("side")
            if side not in sides:
                raise MetricsError(f"unknown embedding side {side!r}")
            emb = TokenEmbeddings(tokens=tuple(obj["tokens"]), vectors=np.array(obj["vectors"]))
            if emb.dim != dim:
                raise MetricsError(
                    f"id {obj['id']!r}: dimension {emb.dim} != declared {dim}"
                )
            sides[side][str(obj["id"])] = emb
    return sides["prediction"], sides["reference"]


def evaluate_pairs(
    predictions_path: str | Path,
    references_path: str | Path,
    embeddings_path: str | Path | None = None,
) -> MetricReport:
    """Score a prediction file against a reference file, joined on id."""
    predictions = read_text_jsonl(predictions_path)
    references = read_text_jsonl(references_path)
    for rid in references:
        if rid not in predictions:
            raise MetricsError(f"id {rid!r} missing in predictions")
    for rid in predictions:
        if rid not in references:
            raise MetricsError(f"id {rid!r} missing in references")

    ids = list(predictions)
    embeddings = None
    if embeddings_path is not None:
        pred_emb, ref_emb = read_embedding_cache(embeddings_path)
        for rid in ids:
            if rid not in pred_emb or rid not in ref_emb:
                raise MetricsError(f"id {rid!r} missing in embedding cache")
        embeddings = [(pred_emb[rid], ref_emb[rid]) for rid in ids]

    return compute_report(
        [predictions[rid] for rid in ids],
        [references[rid] for rid in ids],
        embeddings,
    )


def render_report_text(report: MetricReport) -> str:
    """Plain-text rendering of one MetricReport."""
    bert = report.bertscore
    lines = [
        f"pairs            {report.n_pairs}",
        f"bleu             {report.bleu:.4f}",
        f"rouge1 P/R/F1    {report.rouge1.precision:.4f} {report.rouge1.recall:.4f} {report.rouge1.f1:.4f}",
        (
            f"bertscore P/R/F1 {bert.precision:.4f} {bert.recall:.4f} {bert.f1:.4f}"
            if bert
            else "bertscore        skipped (no embeddings)"
        ),
        f"fkgl             {report.readability.fkgl:.3f}",
        f"cli              {report.readability.cli:.3f}",
        f"dcrs             {report.readability.dcrs:.3f}",
    ]
    return "\n".join(lines) + "\n"
