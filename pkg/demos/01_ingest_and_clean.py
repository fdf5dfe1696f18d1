"""Walk the ingestion + cleaning stages on the bundled sample export.

Reads the raw helpline CSV, shows how dirty rows are counted rather than
crashed on, then normalizes transcript shorthand and prints the
before/after pairs worth looking at.
"""

from pathlib import Path

from agriqa.corpus import ingest_csv
from agriqa.normalize import default_ruleset, detect_runons, normalize_text, parse_quantities

HERE = Path(__file__).parent

records, stats = ingest_csv(HERE / "data" / "sample_kcc.csv")
print(f"ingested {stats.record_count} records, rejected {stats.rejected_row_count}")
print(f"rejection reasons: {dict(stats.rejection_reasons)}")

rules = default_ruleset()
print("\n--- normalization, before vs after ---")
for record in records[:4]:
    cleaned = normalize_text(record.expert_answer, rules)
    marker = " (unchanged)" if cleaned == record.expert_answer else ""
    print(f"\n[{record.id}] {record.expert_answer}")
    print(f"      -> {cleaned}{marker}")

print("\n--- quantities found in the cleaned answers ---")
for record in records[:4]:
    cleaned = normalize_text(record.expert_answer, rules)
    for q in parse_quantities(cleaned, rules):
        rate = f" per {q.per_unit}" if q.per_unit else ""
        print(f"[{record.id}] {q.value:g} {q.unit}{rate}")

print("\n--- run-on token flags (advisory only) ---")
corpus = [(r.id, normalize_text(f"{r.query_text} {r.expert_answer}", rules)) for r in records]
flags = detect_runons(corpus, threshold=2, min_part_freq=3)
for flag in flags:
    print(f"[{flag.record_id}] {flag.token!r} -> {flag.suggested_split!r} (score {flag.score:.1f})")
if not flags:
    print("(none at this corpus size)")
