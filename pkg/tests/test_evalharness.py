import random

import pytest

from agriqa.corpus import QueryRecord, Season, Sector
from agriqa.evalharness import (
    AblationReport,
    Attribute,
    ablate,
    join_pairs,
    render_report,
)
from agriqa.metrics import MetricsError, compute_report
from conftest import random_text, synthetic_records


def pair_for(record, rng):
    return (random_text(rng, 2, 8), record.expert_answer, record)


def make_pairs(records, seed=0):
    rng = random.Random(seed)
    return [pair_for(r, rng) for r in records]


def test_single_subset_row_equals_global():
    records = [
        QueryRecord(id=f"r{i}", query_text="q", expert_answer="spray neem oil",
                    sector=Sector.AGRICULTURE, query_type="Plant Protection")
        for i in range(6)
    ]
    pairs = make_pairs(records, seed=1)
    report = ablate(pairs, [Attribute.SECTOR])
    assert len(report.rows) == 1
    row = report.rows[0]
    assert row.subset == "Agriculture"
    assert row.report == report.global_report


def test_season_rows_match_per_subset_recomputation():
    rng = random.Random(5)
    records = []
    for i in range(30):
        records.append(
            QueryRecord(
                id=f"r{i}", query_text="q", expert_answer=random_text(rng, 3, 9),
                season=[Season.RABI, Season.KHARIF, Season.JAYAD][i % 3],
            )
        )
    pairs = make_pairs(records, seed=2)
    report = ablate(pairs, [Attribute.SEASON])
    assert [row.subset for row in report.rows] == ["Jayad", "Kharif", "Rabi"]
    for row in report.rows:
        subset = [p for p in pairs if p[2].season.value == row.subset]
        direct = compute_report([p[0] for p in subset], [p[1] for p in subset])
        assert row.report == direct


def test_unknown_pairs_excluded_from_attribute_rows():
    rng = random.Random(6)
    known = [
        QueryRecord(id=f"k{i}", query_text="q", expert_answer=random_text(rng, 3, 6),
                    season=Season.RABI)
        for i in range(6)
    ]
    pairs = make_pairs(known, seed=3)
    baseline = ablate(pairs, [Attribute.SEASON])

    unknown = QueryRecord(id="u0", query_text="q", expert_answer="whatever text",
                          season=Season.UNKNOWN)
    widened = pairs + make_pairs([unknown], seed=4)
    report = ablate(widened, [Attribute.SEASON])

    assert [r.subset for r in report.rows] == [r.subset for r in baseline.rows]
    for new_row, old_row in zip(report.rows, baseline.rows):
        assert new_row.report == old_row.report
    # Union-of-subsets accounting: global minus Unknown pairs.
    assert sum(r.report.n_pairs for r in report.rows) == report.global_report.n_pairs - 1


def test_small_subsets_merge_into_other():
    rng = random.Random(7)
    records = []
    for i in range(10):
        records.append(
            QueryRecord(id=f"a{i}", query_text="q", expert_answer=random_text(rng, 3, 6),
                        query_type="Plant Protection")
        )
    records.append(
        QueryRecord(id="b0", query_text="q", expert_answer="rare subset answer",
                    query_type="Government Scheme")
    )
    records.append(
        QueryRecord(id="c0", query_text="q", expert_answer="another rare one",
                    query_type="Cultural Practices")
    )
    pairs = make_pairs(records, seed=8)
    report = ablate(pairs, [Attribute.QUERY_TYPE], min_subset_size=5)
    assert [row.subset for row in report.rows] == ["Plant Protection", "other"]
    other = report.rows[-1]
    assert other.report.n_pairs == 2


def test_ablate_input_validation():
    with pytest.raises(MetricsError):
        ablate([], [Attribute.SECTOR])
    records = synthetic_records(3)
    with pytest.raises(MetricsError):
        ablate(make_pairs(records), [])


def test_render_json_round_trip():
    pairs = make_pairs(synthetic_records(40, seed=11), seed=12)
    report = ablate(pairs, [Attribute.SECTOR, Attribute.SEASON], min_subset_size=3)
    import json

    parsed = AblationReport.from_json_dict(json.loads(render_report(report, "json")))
    assert parsed == report


def test_render_table_layout():
    pairs = make_pairs(synthetic_records(60, seed=13), seed=14)
    report = ablate(
        pairs, [Attribute.SECTOR, Attribute.SEASON, Attribute.QUERY_TYPE], min_subset_size=3
    )
    table = render_report(report, "table")
    lines = table.splitlines()
    header = lines[0]
    # Reporting column order: Bleu, Rouge1, then the P/R/F1 triple.
    assert header.index("Bleu Score") < header.index("Rouge1") < header.index("Precision")
    assert header.index("Precision") < header.index("Recall") < header.index("F1 Score")
    # Attribute labels appear once per group.
    assert sum(1 for line in lines if line.startswith("Sector")) == 1
    assert sum(1 for line in lines if line.startswith("Season")) == 1
    assert sum(1 for line in lines if line.startswith("Query Type")) == 1
    assert lines[-1].startswith("Global")


def test_render_single_row_table():
    records = [
        QueryRecord(id=f"r{i}", query_text="q", expert_answer="stable answer text",
                    sector=Sector.HORTICULTURE)
        for i in range(5)
    ]
    report = ablate(make_pairs(records, seed=15), [Attribute.SECTOR])
    table = render_report(report, "table")
    data_lines = [l for l in table.splitlines()[2:] if l.strip()]
    assert len(data_lines) == 2  # one subset row + the global row


def test_slicing_oracle_property_random_corpora():
    for trial in range(10):
        rng = random.Random(100 + trial)
        records = synthetic_records(rng.randint(10, 60), seed=trial, with_unknowns=True)
        pairs = make_pairs(records, seed=trial)
        report = ablate(
            pairs,
            [Attribute.SECTOR, Attribute.SEASON, Attribute.QUERY_TYPE],
            min_subset_size=rng.choice([1, 3, 5]),
        )
        for row in report.rows:
            if row.subset == "other":
                continue
            subset = [p for p in pairs if row.attribute.value_of(p[2]) == row.subset]
            direct = compute_report([p[0] for p in subset], [p[1] for p in subset])
            assert row.report == direct


def test_join_pairs_validates_ids():
    records = synthetic_records(3, seed=1)
    preds = {r.id: "text" for r in records}
    refs = {r.id: r.expert_answer for r in records}
    pairs = join_pairs(preds, refs, records)
    assert len(pairs) == 3
    with pytest.raises(MetricsError, match="missing in corpus"):
        join_pairs({"ghost": "x"}, {"ghost": "y"}, records)
