"""Seeded stratified splitting, scaled up so the 1% fractions are visible.

The sample CSV is tiny, so this demo synthesizes a larger corpus with the
same shape, splits it 1%/1%, and shows that the split is reproducible and
balanced per stratum.
"""

import random
from collections import Counter

from agriqa.corpus import Partition, QueryRecord, stratified_split

rng = random.Random(2024)
QUERY_TYPES = ["Plant Protection", "Nutrient Management", "Fertilizer Use",
               "Cultural Practices", "Government Scheme"]

records = [
    QueryRecord(
        id=f"q{i:05d}",
        query_text=f"synthetic query {i}",
        expert_answer=f"synthetic answer {i}",
        query_type=rng.choice(QUERY_TYPES),
    )
    for i in range(5000)
]

assignment = stratified_split(records, test_frac=0.01, val_frac=0.01, seed=42)
counts = {p.value: len(assignment.ids_for(p)) for p in Partition}
print(f"partition sizes: {counts}")

print("\nper-stratum test fractions:")
strata = Counter(r.query_type for r in records)
test_ids = set(assignment.ids_for(Partition.TEST))
for query_type, n in sorted(strata.items()):
    in_test = sum(1 for r in records if r.query_type == query_type and r.id in test_ids)
    print(f"  {query_type:<22} {in_test:>3} of {n}  ({in_test / n:.3%})")

again = stratified_split(records, test_frac=0.01, val_frac=0.01, seed=42)
print(f"\nsame seed reproduces the assignment: {assignment.to_json_bytes() == again.to_json_bytes()}")
