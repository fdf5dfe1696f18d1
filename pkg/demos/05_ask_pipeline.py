"""Resolve live-style queries through the full answer pipeline.

Uses the packaged deterministic stub providers, so it runs offline: the
query is normalized, the generation stub returns the local-tone answer,
and the rephrase stub polishes it. Note the graceful fallback when the
rephrase provider has nothing for an input.
"""

from agriqa.modelgw import answer_pipeline, default_stub_config
from agriqa.normalize import default_ruleset

rules = default_ruleset()
gen = default_stub_config("generate")
reph = default_stub_config("rephrase")

for query in [
    "Paddy top dressing",
    "thrips control chilli",
    "asking new farming introducing app",  # no rephrase fixture: falls back
]:
    bundle = answer_pipeline(query, rules, gen, reph)
    print(f"query:      {query}")
    print(f"normalized: {bundle.query_normalized}")
    print(f"local tone: {bundle.raw_answer}")
    if bundle.rephrased_answer:
        print(f"rephrased:  {bundle.rephrased_answer}")
    else:
        print(f"rephrased:  (unavailable: {bundle.rephrase_status.value})")
    print(f"timing:     generate {bundle.latency_generate * 1000:.1f} ms")
    print()
