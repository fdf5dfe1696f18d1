import re
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from agriqa.normalize import (
    FlagError,
    NormalizationRuleSet,
    RuleSetError,
    RunOnFlag,
    apply_flags,
    detect_runons,
    load_ruleset,
    normalize_text,
    parse_quantities,
)
from agriqa.tokenizer import tokenize
from conftest import WORDS, random_text

GOLDEN_1_IN = "spray borox 5g copper sulphate 5g zinc sulphate 5gmlit of water"
GOLDEN_1_OUT = "spray borox 5 grams copper sulphate 5 grams zinc sulphate 5 grams per litre of water"
GOLDEN_2_IN = "apply DAP 50kg neemcake 10kg per ac"
GOLDEN_2_OUT = "apply dap 50 kilograms neem cake 10 kilograms per acre"


def test_golden_pairs_byte_exact(rules):
    assert normalize_text(GOLDEN_1_IN, rules) == GOLDEN_1_OUT
    assert normalize_text(GOLDEN_2_IN, rules) == GOLDEN_2_OUT


def test_normalized_text_is_fixed_point(rules):
    assert normalize_text(GOLDEN_1_OUT, rules) == GOLDEN_1_OUT
    assert normalize_text(GOLDEN_2_OUT, rules) == GOLDEN_2_OUT


def test_proper_noun_whitelist_survives_folding(rules):
    text = "recommended to contact Coimbatore office, spray Dithane 2g"
    out = normalize_text(text, rules)
    assert "Coimbatore" in out
    assert "Dithane" in out
    assert "recommended" in out


def test_abbreviation_identity_keeps_acronym_lowercase(rules):
    assert normalize_text("DAP", rules) == "dap"
    assert normalize_text("apply govt scheme", rules) == "apply government scheme"


@settings(max_examples=150, deadline=None)
@given(st.text(max_size=80))
def test_idempotence_random_strings(rules, text):
    once = normalize_text(text, rules)
    assert normalize_text(once, rules) == once


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_idempotence_corpus_like_strings(rules, data):
    import random

    rng = random.Random(data.draw(st.integers(0, 10**9)))
    pieces = []
    for _ in range(rng.randint(1, 10)):
        pieces.append(
            rng.choice(
                [
                    random_text(rng, 1, 3),
                    f"{rng.randint(1, 99)}kg",
                    f"{rng.randint(1, 9)}gmlit",
                    "neemcake",
                    "DAP 50kg per ac",
                ]
            )
        )
    text = " ".join(pieces)
    once = normalize_text(text, rules)
    assert normalize_text(once, rules) == once


@settings(max_examples=150, deadline=None)
@given(st.text(max_size=80))
def test_number_multiset_preserved(rules, text):
    numbers = re.compile(r"\d+(?:\.\d+)?")
    before = Counter(numbers.findall(text))
    after = Counter(numbers.findall(normalize_text(text, rules)))
    assert before == after


def test_unknown_tokens_pass_through(rules):
    assert normalize_text("xyzzy plugh", rules) == "xyzzy plugh"


def test_ruleset_rejects_uppercase_keys():
    with pytest.raises(RuleSetError):
        NormalizationRuleSet(
            unit_lexicon={"Kg": "kilograms"}, abbreviation_map={}, compound_splits={}
        )


def test_ruleset_rejects_case_only_mapping():
    with pytest.raises(RuleSetError):
        NormalizationRuleSet(
            unit_lexicon={}, abbreviation_map={"dap": "DAP"}, compound_splits={}
        )


def test_load_ruleset_from_directory(tmp_path):
    (tmp_path / "units.tsv").write_text("g\tgrams\n# comment\nkg\tkilograms\n")
    (tmp_path / "abbreviations.tsv").write_text("dap\tdap\n")
    (tmp_path / "compounds.tsv").write_text("neemcake\tneem cake\n")
    rules = load_ruleset(tmp_path)
    assert rules.unit_lexicon == {"g": "grams", "kg": "kilograms"}
    assert normalize_text("5g neemcake", rules) == "5 grams neem cake"


# -- quantity parsing -------------------------------------------------------


def test_parse_quantities_rate(rules):
    tokens = parse_quantities("spray thiodicarb 2 grams per litre of water", rules)
    assert len(tokens) == 1
    assert tokens[0].value == 2.0
    assert tokens[0].unit == "grams"
    assert tokens[0].per_unit == "litre"


def test_parse_quantities_no_numbers(rules):
    assert parse_quantities("hello world", rules) == []


def test_parse_quantities_three_doses(rules):
    # Hand enumeration over the fertilizer-blend answer string.
    text = "apply urea 25 kilograms potash 15 kilograms micronutrient mixture 5 kilograms per acre"
    tokens = parse_quantities(text, rules)
    assert [(t.value, t.unit, t.per_unit) for t in tokens] == [
        (25.0, "kilograms", None),
        (15.0, "kilograms", None),
        (5.0, "kilograms", "acre"),
    ]


def test_parse_quantities_phone_guard(rules):
    text = "contact office phone - 0422-2453578"
    assert parse_quantities(text, rules) == []
    long_run = "dial 08447518196 grams"  # 11-digit run never becomes a dose
    assert parse_quantities(long_run, rules) == []


def test_parse_quantities_number_without_unit(rules):
    assert parse_quantities("sow 90 days after planting", rules) == []


# -- run-on detection -------------------------------------------------------


def bisection_oracle(corpus_texts, token, min_part_freq=10):
    """Brute force: does any split of token give two sufficiently frequent
    vocabulary words?"""
    freq = Counter()
    for text in corpus_texts:
        freq.update(tokenize(text))
    low = token.lower()
    return any(
        freq[low[:i]] >= min_part_freq and freq[low[i:]] >= min_part_freq
        for i in range(1, len(low))
    )


def make_corpus(entries):
    return [(f"r{i}", text) for i, text in enumerate(entries)]


def test_detect_runons_flags_fused_token():
    corpus = make_corpus(["neem cake"] * 20 + ["apply neemcake today"])
    flags = detect_runons(corpus)
    assert len(flags) == 1
    flag = flags[0]
    assert flag.token == "neemcake"
    assert flag.suggested_split == "neem cake"
    assert flag.record_id == "r20"
    assert flag.span == (1, 2)
    assert flag.score > 0


def test_detect_runons_clean_corpus_empty():
    corpus = make_corpus(["neem cake"] * 20)
    assert detect_runons(corpus) == []


def test_detect_runons_cropseason():
    # "cropseason" once; "crop" and "season" 50 times each.
    entries = ["crop season"] * 50 + ["cropseason"]
    flags = detect_runons(make_corpus(entries))
    assert len(flags) == 1
    assert flags[0].suggested_split == "crop season"


def test_detect_runons_respects_threshold():
    # Fused token appears often enough to be vocabulary itself.
    entries = ["crop season"] * 50 + ["cropseason"] * 10
    assert detect_runons(make_corpus(entries), threshold=2) == []


def test_detect_runons_order_validation():
    with pytest.raises(ValueError):
        detect_runons(make_corpus(["a"]), n=0)
    with pytest.raises(ValueError):
        detect_runons([], n=2)
    assert detect_runons(make_corpus(["crop season"] * 50 + ["cropseason"]), n=1) == []


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_detect_runons_never_beats_bisection_oracle(data):
    import random

    rng = random.Random(data.draw(st.integers(0, 10**9)))
    entries = []
    for _ in range(rng.randint(5, 40)):
        entries.append(random_text(rng, 1, 6))
    # Sprinkle in some fused words built from the same pool.
    for _ in range(rng.randint(0, 4)):
        entries.append(rng.choice(WORDS) + rng.choice(WORDS))
    corpus = make_corpus(entries)
    texts = [t for _, t in corpus]
    for flag in detect_runons(corpus):
        assert bisection_oracle(texts, flag.token)


# -- flag application -------------------------------------------------------


def flag_at(span, suggestion, record_id="r0", token="x", score=1.0):
    return RunOnFlag(record_id=record_id, token=token, span=span,
                     score=score, suggested_split=suggestion)


def test_apply_flags_single():
    out = apply_flags("apply neemcake", [flag_at((1, 2), "neem cake", token="neemcake")])
    assert out == "apply neem cake"


def test_apply_flags_empty_is_identity():
    text = "any text at all, even with punctuation..."
    assert apply_flags(text, []) == text


def test_apply_flags_two_disjoint():
    out = apply_flags(
        "neemcake and cowdung",
        [flag_at((0, 1), "neem cake"), flag_at((2, 3), "cow dung")],
    )
    assert out == "neem cake and cow dung"


def test_apply_flags_overlap_rejected():
    with pytest.raises(FlagError):
        apply_flags("a b c", [flag_at((0, 2), "x"), flag_at((1, 3), "y")])


def test_apply_flags_span_bounds_checked():
    with pytest.raises(FlagError):
        apply_flags("a b", [flag_at((1, 5), "x")])
