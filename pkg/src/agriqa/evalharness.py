"""Metadata ablation: slice evaluation pairs by sector, season, and query
type and score each slice independently.

Each subset row carries a full :class:`~agriqa.metrics.MetricReport`
computed on exactly that subset's pairs, so per-subset scores can be
checked against a direct recomputation. Pairs whose attribute value is
Unknown are excluded from that attribute's rows; subsets below the size
floor are merged into an "other" row.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Mapping, Sequence

from .corpus import QueryRecord
from .metrics import MetricReport, MetricsError, TokenEmbeddings, compute_report

UNKNOWN = "Unknown"
OTHER_SUBSET = "other"
DEFAULT_MIN_SUBSET_SIZE = 5


class Attribute(enum.Enum):
    SECTOR = "sector"
    SEASON = "season"
    QUERY_TYPE = "query_type"

    def value_of(self, record: QueryRecord) -> str:
        if self is Attribute.SECTOR:
            return record.sector.value
        if self is Attribute.SEASON:
            return record.season.value
        return record.query_type.strip() or UNKNOWN


# One evaluation pair: (prediction, reference, corpus record).
Pair = tuple[str, str, QueryRecord]


@dataclass(frozen=True)
class AblationRow:
    attribute: Attribute
    subset: str
    report: MetricReport


@dataclass(frozen=True)
class AblationReport:
    rows: tuple[AblationRow, ...]
    global_report: MetricReport

    def to_json_dict(self) -> dict:
        return {
            "rows": [
                {
                    "attribute": row.attribute.value,
                    "subset": row.subset,
                    "report": row.report.to_json_dict(),
                }
                for row in self.rows
            ],
            "global": self.global_report.to_json_dict(),
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "AblationReport":
        rows = tuple(
            AblationRow(
                attribute=Attribute(row["attribute"]),
                subset=row["subset"],
                report=MetricReport.from_json_dict(row["report"]),
            )
            for row in obj["rows"]
        )
        return cls(rows=rows, global_report=MetricReport.from_json_dict(obj["global"]))


def _subset_report(
    pairs: Sequence[Pair],
    embeddings: Mapping[str, tuple[TokenEmbeddings, TokenEmbeddings]] | None,
) -> MetricReport:
    cands = [p[0] for p in pairs]
    refs = [p[1] for p in pairs]
    emb = None
    if embeddings is not None:
        missing = [p[2].id for p in pairs if p[2].id not in embeddings]
        if missing:
            raise MetricsError(f"ids missing from embeddings: {missing[:5]}")
        emb = [embeddings[p[2].id] for p in pairs]
    return compute_report(cands, refs, emb)


def ablate(
    pairs: Sequence[Pair],
    attributes: Sequence[Attribute],
    min_subset_size: int = DEFAULT_MIN_SUBSET_SIZE,
    embeddings: Mapping[str, tuple[TokenEmbeddings, TokenEmbeddings]] | None = None,
) -> AblationReport:
    """Score every (attribute, subset) slice plus the global pair set.

    Row order is deterministic: attributes in the order given, subsets
    alphabetically with the merged "other" row last.
    """
    if not pairs:
        raise MetricsError("ablation needs at least one pair")
    if not attributes:
        raise MetricsError("ablation needs at least one attribute")

    rows: list[AblationRow] = []
    for attribute in attributes:
        groups: dict[str, list[Pair]] = {}
        for pair in pairs:
            value = attribute.value_of(pair[2])
            if value == UNKNOWN:
                continue
            groups.setdefault(value, []).append(pair)

        kept = {name: grp for name, grp in groups.items() if len(grp) >= min_subset_size}
        # Merge small subsets in original pair order, so the "other" report
        # equals a direct recomputation over exactly those pairs.
        merged = [
            pair
            for pair in pairs
            if (value := attribute.value_of(pair[2])) != UNKNOWN and value not in kept
        ]

        for name in sorted(kept):
            rows.append(AblationRow(attribute, name, _subset_report(kept[name], embeddings)))
        if merged:
            rows.append(AblationRow(attribute, OTHER_SUBSET, _subset_report(merged, embeddings)))

    return AblationReport(
        rows=tuple(rows),
        global_report=_subset_report(list(pairs), embeddings),
    )


_ATTRIBUTE_LABELS = {
    Attribute.SECTOR: "Sector",
    Attribute.SEASON: "Season",
    Attribute.QUERY_TYPE: "Query Type",
}

_TABLE_COLUMNS = ("Bleu Score", "Rouge1", "Precision", "Recall", "F1 Score", "Pairs")


def _table_cells(report: MetricReport) -> list[str]:
    bert = report.bertscore
    return [
        f"{report.bleu:.3f}",
        f"{report.rouge1.f1:.3f}",
        f"{bert.precision:.3f}" if bert else "-",
        f"{bert.recall:.3f}" if bert else "-",
        f"{bert.f1:.3f}" if bert else "-",
        str(report.n_pairs),
    ]


def render_report(report: AblationReport, format: str = "json") -> str:
    """Render an ablation report as lossless JSON or an aligned text table.

    The table groups rows by attribute (attribute name shown once per
    group) with columns in Bleu/Rouge1/Precision/Recall/F1 order.
    """
    if format == "json":
        return json.dumps(report.to_json_dict(), ensure_ascii=False, indent=2) + "\n"
    if format != "table":
        raise ValueError(f"unknown format {format!r}")

    header = ["Meta Data", "Subset", *_TABLE_COLUMNS]
    table_rows: list[list[str]] = []
    previous_attr = None
    for row in report.rows:
        label = _ATTRIBUTE_LABELS[row.attribute] if row.attribute is not previous_attr else ""
        previous_attr = row.attribute
        table_rows.append([label, row.subset, *_table_cells(row.report)])
    table_rows.append(["Global", "all", *_table_cells(report.global_report)])

    widths = [
        max(len(header[i]), *(len(r[i]) for r in table_rows)) for i in range(len(header))
    ]

    def fmt(cells: list[str]) -> str:
        return "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(cells)).rstrip()

    lines = [fmt(header), fmt(["-" * w for w in widths])]
    lines.extend(fmt(r) for r in table_rows)
    return "\n".join(lines) + "\n"


def join_pairs(
    predictions: Mapping[str, str],
    references: Mapping[str, str],
    records: Sequence[QueryRecord],
) -> list[Pair]:
    """Join prediction/reference texts with corpus records on id."""
    by_id = {r.id: r for r in records}
    pairs: list[Pair] = []
    for rid, pred in predictions.items():
        if rid not in references:
            raise MetricsError(f"id {rid!r} missing in references")
        if rid not in by_id:
            raise MetricsError(f"id {rid!r} missing in corpus")
        pairs.append((pred, references[rid], by_id[rid]))
    return pairs
