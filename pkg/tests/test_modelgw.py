import json
import random
import time

import pytest
from hypothesis import given, settings, strategies as st

from agriqa.modelgw import (
    REPHRASE_PROMPT_PREFIX,
    AnswerBundle,
    ProviderConfig,
    ProviderError,
    ProviderResponseError,
    ProviderStatusError,
    ProviderTimeout,
    RephraseStatus,
    answer_pipeline,
    build_rephrase_prompt,
    default_stub_config,
    generate_answer,
    probe_provider,
    rephrase,
)
from agriqa.stubserver import StubProviderServer

PADDY_ANSWER = "apply urea 25 kilograms potash 15 kilograms micronutrient mixture 5 kilograms per acre"


@pytest.fixture()
def fixture_file(tmp_path):
    path = tmp_path / "fixtures.jsonl"
    entries = [
        {"input": "paddy top dressing", "output": PADDY_ANSWER},
        {
            "input": REPHRASE_PROMPT_PREFIX + "recommended for spray fipronil 2 millilitre per litreer of water",
            "output": "The recommended dilution for fipronil is 2 milliliters per liter of water.",
        },
    ]
    path.write_text("\n".join(json.dumps(e) for e in entries) + "\n", encoding="utf-8")
    return path


def cfg_for(server, timeout=2.0, max_retries=2):
    return ProviderConfig(base_url=server.url, model_name="test-model",
                          timeout=timeout, max_retries=max_retries)


# -- prompt builder ----------------------------------------------------------


def test_prompt_exact_string():
    out = build_rephrase_prompt("apply urea 25 kilograms potash")
    assert out == "Paraphrase and Correct Tone: apply urea 25 kilograms potash"


def test_prompt_single_token():
    assert build_rephrase_prompt("x") == "Paraphrase and Correct Tone: x"


def test_prompt_preserves_newlines():
    response = "line one\nline two\n"
    assert build_rephrase_prompt(response) == REPHRASE_PROMPT_PREFIX + response


def test_prompt_rejects_empty():
    with pytest.raises(ValueError):
        build_rephrase_prompt("")


@settings(max_examples=100, deadline=None)
@given(st.text(min_size=1, max_size=200))
def test_prompt_byte_equality_property(response):
    assert build_rephrase_prompt(response) == REPHRASE_PROMPT_PREFIX + response


# -- stub provider (in-process) ---------------------------------------------


def test_stub_lookup(fixture_file):
    cfg = ProviderConfig(base_url=f"stub:{fixture_file}", model_name="stub")
    assert generate_answer("paddy top dressing", cfg) == PADDY_ANSWER


def test_stub_miss_is_status_error(fixture_file):
    cfg = ProviderConfig(base_url=f"stub:{fixture_file}")
    with pytest.raises(ProviderStatusError):
        generate_answer("unknown query", cfg)


def test_packaged_stub_serves_table_answers():
    cfg = default_stub_config("generate")
    assert generate_answer("paddy top dressing", cfg) == PADDY_ANSWER
    assert (
        generate_answer("asking about watermelon sowing season", cfg)
        == "recommended watermelon sowing season november - december"
    )


# -- HTTP client behavior ----------------------------------------------------


def test_generate_over_http(fixture_file):
    with StubProviderServer(fixture_file) as server:
        assert generate_answer("paddy top dressing", cfg_for(server)) == PADDY_ANSWER
        assert server.request_count == 1


def test_generate_retries_after_two_500s(fixture_file):
    with StubProviderServer(fixture_file, mode="fail_times", fail_times=2) as server:
        out = generate_answer("paddy top dressing", cfg_for(server, max_retries=2))
        assert out == PADDY_ANSWER
        assert server.request_count == 3  # two retries happened


def test_generate_exhausted_retries_raise_status(fixture_file):
    with StubProviderServer(fixture_file, mode="always_500") as server:
        with pytest.raises(ProviderStatusError) as err:
            generate_answer("paddy top dressing", cfg_for(server, max_retries=1))
        assert err.value.status == 500
        assert server.request_count == 2


def test_generate_timeout_bounded(fixture_file):
    timeout, retries = 0.2, 2
    with StubProviderServer(fixture_file, mode="hang", hang_seconds=5.0) as server:
        start = time.perf_counter()
        with pytest.raises(ProviderTimeout):
            generate_answer("paddy top dressing", cfg_for(server, timeout=timeout, max_retries=retries))
        elapsed = time.perf_counter() - start
    assert elapsed <= timeout * (1 + retries) + 0.2


def test_generate_malformed_body(fixture_file):
    with StubProviderServer(fixture_file, mode="malformed") as server:
        with pytest.raises(ProviderResponseError):
            generate_answer("paddy top dressing", cfg_for(server))
        assert server.request_count == 1  # deterministic failure: no retry


def test_generate_empty_output(fixture_file):
    with StubProviderServer(fixture_file, mode="empty") as server:
        with pytest.raises(ProviderResponseError, match="empty"):
            generate_answer("paddy top dressing", cfg_for(server))


def test_generate_404_no_retry(fixture_file):
    with StubProviderServer(fixture_file) as server:
        with pytest.raises(ProviderStatusError) as err:
            generate_answer("never heard of it", cfg_for(server))
        assert err.value.status == 404
        assert server.request_count == 1


def test_provider_config_validation():
    with pytest.raises(ValueError):
        ProviderConfig(base_url="http://x", timeout=0)
    with pytest.raises(ValueError):
        ProviderConfig(base_url="http://x", max_retries=-1)


# -- rephrase fallback contract ----------------------------------------------


def test_rephrase_success(fixture_file):
    with StubProviderServer(fixture_file) as server:
        text, status = rephrase(
            "recommended for spray fipronil 2 millilitre per litreer of water",
            cfg_for(server),
        )
    assert status is RephraseStatus.OK
    assert text == "The recommended dilution for fipronil is 2 milliliters per liter of water."


def test_rephrase_timeout_falls_back(fixture_file):
    with StubProviderServer(fixture_file, mode="hang", hang_seconds=5.0) as server:
        text, status = rephrase("any answer", cfg_for(server, timeout=0.15, max_retries=0))
    assert text is None
    assert status is RephraseStatus.FALLBACK_TIMEOUT


def test_rephrase_500_falls_back(fixture_file):
    with StubProviderServer(fixture_file, mode="always_500") as server:
        text, status = rephrase("any answer", cfg_for(server, max_retries=0))
    assert (text, status) == (None, RephraseStatus.FALLBACK_PROVIDER_ERROR)


def test_rephrase_empty_output_falls_back(fixture_file):
    with StubProviderServer(fixture_file, mode="empty") as server:
        text, status = rephrase("any answer", cfg_for(server))
    assert (text, status) == (None, RephraseStatus.FALLBACK_PROVIDER_ERROR)


# -- bundle + pipeline -------------------------------------------------------


def test_bundle_invariants():
    with pytest.raises(ValueError):
        AnswerBundle(
            query_normalized="q", raw_answer=" ", rephrased_answer=None,
            rephrase_status=RephraseStatus.SKIPPED, latency_generate=0.0,
            latency_rephrase=None,
        )
    with pytest.raises(ValueError):
        AnswerBundle(
            query_normalized="q", raw_answer="a", rephrased_answer="b",
            rephrase_status=RephraseStatus.SKIPPED, latency_generate=0.0,
            latency_rephrase=None,
        )


def test_pipeline_rephrase_disabled(rules):
    bundle = answer_pipeline(
        "asking about watermelon sowing season",
        rules,
        default_stub_config("generate"),
        default_stub_config("rephrase"),
        rephrase_enabled=False,
    )
    assert bundle.raw_answer == "recommended watermelon sowing season november - december"
    assert bundle.rephrase_status is RephraseStatus.SKIPPED
    assert bundle.rephrased_answer is None
    assert bundle.latency_rephrase is None


def test_pipeline_both_variants(rules):
    bundle = answer_pipeline(
        "Paddy top dressing",  # case-folded by normalization before lookup
        rules,
        default_stub_config("generate"),
        default_stub_config("rephrase"),
    )
    assert bundle.query_normalized == "paddy top dressing"
    assert bundle.raw_answer == PADDY_ANSWER
    assert bundle.rephrase_status is RephraseStatus.OK
    assert bundle.rephrased_answer == (
        "Apply a fertilizer blend of 25 kilograms urea, 15 kilograms potash, "
        "and 5 kilograms micronutrient mixture per acre."
    )
    assert bundle.latency_generate >= 0
    assert bundle.latency_rephrase >= 0


def test_pipeline_rephrase_provider_down(rules, tmp_path):
    missing = ProviderConfig(base_url=f"stub:{tmp_path/'missing.jsonl'}")
    bundle = answer_pipeline(
        "paddy top dressing", rules, default_stub_config("generate"), missing
    )
    assert bundle.raw_answer == PADDY_ANSWER
    assert bundle.rephrase_status is RephraseStatus.FALLBACK_PROVIDER_ERROR


def test_pipeline_generation_failure_aborts(rules, tmp_path):
    missing = ProviderConfig(base_url=f"stub:{tmp_path/'missing.jsonl'}")
    with pytest.raises(ProviderError):
        answer_pipeline("paddy top dressing", rules, missing, None)


def test_pipeline_fault_totality(rules, fixture_file):
    # Every injected rephrase fault still yields a bundle with the raw answer.
    gen = default_stub_config("generate")
    faults = [
        ("hang", RephraseStatus.FALLBACK_TIMEOUT),
        ("always_500", RephraseStatus.FALLBACK_PROVIDER_ERROR),
        ("malformed", RephraseStatus.FALLBACK_PROVIDER_ERROR),
        ("empty", RephraseStatus.FALLBACK_PROVIDER_ERROR),
    ]
    for mode, expected_status in faults:
        with StubProviderServer(fixture_file, mode=mode, hang_seconds=2.0) as server:
            bundle = answer_pipeline(
                "paddy top dressing", rules, gen,
                cfg_for(server, timeout=0.15, max_retries=0),
            )
        assert bundle.raw_answer == PADDY_ANSWER
        assert bundle.rephrase_status is expected_status, mode


def test_probe_provider(fixture_file, tmp_path):
    with StubProviderServer(fixture_file) as server:
        assert probe_provider(cfg_for(server))
    assert not probe_provider(ProviderConfig(base_url="http://127.0.0.1:1/"), timeout=0.3)
    assert probe_provider(ProviderConfig(base_url=f"stub:{fixture_file}"))
    assert not probe_provider(ProviderConfig(base_url=f"stub:{tmp_path/'nope.jsonl'}"))


def test_stub_default_entry(tmp_path):
    path = tmp_path / "f.jsonl"
    path.write_text(json.dumps({"input": "__default__", "output": "fallback for: {input}"}) + "\n")
    cfg = ProviderConfig(base_url=f"stub:{path}")
    assert generate_answer("anything else", cfg) == "fallback for: anything else"
