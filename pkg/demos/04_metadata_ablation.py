"""Slice evaluation scores by call metadata.

Builds a synthetic prediction set over a corpus with sector/season/query
type labels and renders the per-subset table (the layout used for
reporting slice-level robustness).
"""

import random

from agriqa.corpus import QueryRecord, Season, Sector
from agriqa.evalharness import Attribute, ablate, render_report

rng = random.Random(11)
WORDS = "spray apply urea neem oil water litre acre dose pest leaf crop field".split()

pairs = []
for i in range(120):
    reference = " ".join(rng.choices(WORDS, k=rng.randint(4, 9)))
    # Corrupt a few tokens to get realistic, subset-dependent scores.
    tokens = reference.split()
    for _ in range(rng.randint(0, 3)):
        tokens[rng.randrange(len(tokens))] = rng.choice(WORDS)
    record = QueryRecord(
        id=f"r{i:04d}",
        query_text=f"query {i}",
        expert_answer=reference,
        sector=rng.choice([Sector.AGRICULTURE, Sector.HORTICULTURE]),
        season=rng.choice([Season.RABI, Season.KHARIF, Season.JAYAD]),
        query_type=rng.choice(["Plant Protection", "Nutrient Management", "Fertilizer Use"]),
    )
    pairs.append((" ".join(tokens), reference, record))

report = ablate(pairs, [Attribute.SECTOR, Attribute.SEASON, Attribute.QUERY_TYPE])
print(render_report(report, "table"))
