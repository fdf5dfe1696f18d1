import random

import pytest

from agriqa.corpus import QueryRecord, Season, Sector
from agriqa.normalize import default_ruleset

QUERY_TYPES = [
    "Plant Protection",
    "Nutrient Management",
    "Fertilizer Use",
    "Cultural Practices",
    "Government Scheme",
]

WORDS = (
    "apply spray urea potash paddy banana brinjal tomato chilli neem cake "
    "water litre acre field seed pest leaf crop season mixture grams dose "
    "recommended control deficiency management sowing contact scheme"
).split()


def synthetic_records(n, seed=0, with_unknowns=False):
    """Deterministic synthetic corpus with varied metadata."""
    rng = random.Random(seed)
    sectors = [Sector.AGRICULTURE, Sector.HORTICULTURE]
    seasons = [Season.RABI, Season.KHARIF, Season.JAYAD]
    if with_unknowns:
        sectors = sectors + [Sector.UNKNOWN]
        seasons = seasons + [Season.UNKNOWN]
    records = []
    for i in range(n):
        records.append(
            QueryRecord(
                id=f"q{i:05d}",
                state="Tamil Nadu",
                district=rng.choice(["Coimbatore", "Madurai", "Salem"]),
                sector=rng.choice(sectors),
                season=rng.choice(seasons),
                crop=rng.choice(["paddy", "banana", "brinjal", "tomato"]),
                query_type=rng.choice(QUERY_TYPES),
                query_text=" ".join(rng.choices(WORDS, k=rng.randint(3, 8))),
                expert_answer=" ".join(rng.choices(WORDS, k=rng.randint(4, 12))),
            )
        )
    return records


def random_text(rng, min_words=1, max_words=10):
    return " ".join(rng.choices(WORDS, k=rng.randint(min_words, max_words)))


@pytest.fixture(scope="session")
def rules():
    return default_ruleset()
