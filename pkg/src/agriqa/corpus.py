"""Helpline corpus: record schema, CSV ingestion, and stratified splits.

A corpus row is one transcribed helpline call: the farmer's query, the
expert's recorded answer, and call metadata (state, district, sector,
season, crop, query type). Ingestion is tolerant of dirty metadata but
strict about the two text fields; splitting is seeded and stratified so
train/validation/test partitions are reproducible.
"""

from __future__ import annotations

import csv
import enum
import json
import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence


class CorpusError(Exception):
    """Raised for unusable inputs: missing files, columns, or zero valid rows."""


class Sector(enum.Enum):
    AGRICULTURE = "Agriculture"
    HORTICULTURE = "Horticulture"
    UNKNOWN = "Unknown"

    @classmethod
    def parse(cls, raw: str) -> "Sector":
        cleaned = (raw or "").strip().lower()
        for member in cls:
            if member.value.lower() == cleaned:
                return member
        return cls.UNKNOWN


class Season(enum.Enum):
    RABI = "Rabi"
    KHARIF = "Kharif"
    JAYAD = "Jayad"
    UNKNOWN = "Unknown"

    @classmethod
    def parse(cls, raw: str) -> "Season":
        cleaned = (raw or "").strip().lower()
        for member in cls:
            if member.value.lower() == cleaned:
                return member
        return cls.UNKNOWN


class Partition(enum.Enum):
    TRAIN = "train"
    VALIDATION = "validation"
    TEST = "test"


@dataclass(frozen=True)
class QueryRecord:
    """One helpline transcript row. Immutable, safe to share across threads."""

    id: str
    query_text: str
    expert_answer: str
    state: str = ""
    district: str = ""
    sector: Sector = Sector.UNKNOWN
    season: Season = Season.UNKNOWN
    crop: str = ""
    query_type: str = ""
    created_on: date | None = None

    def __post_init__(self) -> None:
        if not self.query_text.strip():
            raise ValueError("query_text must be non-empty")
        if not self.expert_answer.strip():
            raise ValueError("expert_answer must be non-empty")

    def to_json_dict(self) -> dict:
        # Field order is the wire contract for partition files.
        return {
            "id": self.id,
            "state": self.state,
            "district": self.district,
            "sector": self.sector.value,
            "season": self.season.value,
            "crop": self.crop,
            "query_type": self.query_type,
            "query_text": self.query_text,
            "expert_answer": self.expert_answer,
            "created_on": self.created_on.isoformat() if self.created_on else "",
        }

    @classmethod
    def from_json_dict(cls, obj: Mapping) -> "QueryRecord":
        raw_date = (obj.get("created_on") or "").strip()
        return cls(
            id=str(obj["id"]),
            state=obj.get("state", ""),
            district=obj.get("district", ""),
            sector=Sector.parse(obj.get("sector", "")),
            season=Season.parse(obj.get("season", "")),
            crop=obj.get("crop", ""),
            query_type=obj.get("query_type", ""),
            query_text=obj["query_text"],
            expert_answer=obj["expert_answer"],
            created_on=date.fromisoformat(raw_date) if raw_date else None,
        )


@dataclass
class CorpusStats:
    """Row accounting for one ingestion pass."""

    record_count: int = 0
    rejected_row_count: int = 0
    rejection_reasons: Counter = field(default_factory=Counter)
    stratum_counts: Counter = field(default_factory=Counter)

    @property
    def parsed_row_count(self) -> int:
        return self.record_count + self.rejected_row_count

    def to_json_dict(self) -> dict:
        return {
            "record_count": self.record_count,
            "rejected_row_count": self.rejected_row_count,
            "rejection_reasons": dict(sorted(self.rejection_reasons.items())),
            "stratum_counts": {
                " / ".join(key): count
                for key, count in sorted(self.stratum_counts.items())
            },
        }


# Column names of the common KCC export header set. Values are overridable
# via the [corpus] config section; the raw export schema varies by source.
DEFAULT_SCHEMA_MAP: dict[str, str] = {
    "id": "ID",
    "state": "StateName",
    "district": "DistrictName",
    "sector": "Sector",
    "season": "Season",
    "crop": "Crop",
    "query_type": "QueryType",
    "query_text": "QueryText",
    "expert_answer": "KccAns",
    "created_on": "CreatedOn",
}

MANDATORY_FIELDS = ("query_text", "expert_answer")

_DATE_FORMATS = ("%Y-%m-%d", "%d-%m-%Y", "%d/%m/%Y", "%Y/%m/%d")


def _parse_date(raw: str) -> date | None:
    from datetime import datetime

    cleaned = (raw or "").strip()
    if not cleaned:
        return None
    # Exports mix date and datetime stamps; keep the date part.
    cleaned = cleaned.split(" ")[0].split("T")[0]
    for fmt in _DATE_FORMATS:
        try:
            return datetime.strptime(cleaned, fmt).date()
        except ValueError:
            continue
    return None


def stratum_key(record: QueryRecord) -> tuple[str, str]:
    """Default stratification key: (query_type, sector)."""
    return (record.query_type, record.sector.value)


def iter_csv(
    path: str | Path,
    schema_map: Mapping[str, str] | None = None,
    stats: CorpusStats | None = None,
) -> Iterator[QueryRecord]:
    """Stream valid records from a CSV export, counting rejects in ``stats``.

    Malformed rows (empty query or answer, short rows) are counted and
    skipped; metadata problems never reject a row. ``stats`` is complete
    only once the iterator is exhausted.
    """
    path = Path(path)
    if not path.exists():
        raise CorpusError(f"corpus file not found: {path}")
    mapping = dict(DEFAULT_SCHEMA_MAP)
    mapping.update(schema_map or {})
    if stats is None:
        stats = CorpusStats()

    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for fld in MANDATORY_FIELDS:
            if mapping[fld] not in header:
                raise CorpusError(
                    f"mandatory column {mapping[fld]!r} (for {fld}) missing; "
                    f"header has {header}"
                )

        def cell(row: dict, fld: str) -> str:
            value = row.get(mapping[fld])
            return (value or "").strip()

        for lineno, row in enumerate(reader, start=2):
            query_text = cell(row, "query_text")
            expert_answer = cell(row, "expert_answer")
            if not query_text:
                stats.rejected_row_count += 1
                stats.rejection_reasons["empty query_text"] += 1
                continue
            if not expert_answer:
                stats.rejected_row_count += 1
                stats.rejection_reasons["empty expert_answer"] += 1
                continue

            record_id = cell(row, "id") or f"r{lineno - 1:06d}"
            record = QueryRecord(
                id=record_id,
                state=cell(row, "state"),
                district=cell(row, "district"),
                sector=Sector.parse(cell(row, "sector")),
                season=Season.parse(cell(row, "season")),
                crop=cell(row, "crop"),
                query_type=cell(row, "query_type"),
                query_text=query_text,
                expert_answer=expert_answer,
                created_on=_parse_date(cell(row, "created_on")),
            )
            stats.record_count += 1
            stats.stratum_counts[stratum_key(record)] += 1
            yield record


def ingest_csv(
    path: str | Path,
    schema_map: Mapping[str, str] | None = None,
) -> tuple[list[QueryRecord], CorpusStats]:
    """Read a CSV export eagerly. Raises if no row survives validation."""
    stats = CorpusStats()
    records = list(iter_csv(path, schema_map, stats))
    if not records:
        raise CorpusError(f"no valid rows in {path} ({stats.rejected_row_count} rejected)")
    return records, stats


@dataclass
class SplitAssignment:
    """record_id -> partition, plus the seed that produced it."""

    partitions: dict[str, Partition]
    seed: int
    stratum_field: str = "query_type/sector"

    def ids_for(self, partition: Partition) -> list[str]:
        return [rid for rid, part in self.partitions.items() if part is partition]

    def to_json_bytes(self) -> bytes:
        doc = {
            "seed": self.seed,
            "stratum_field": self.stratum_field,
            "partitions": {
                rid: part.value for rid, part in sorted(self.partitions.items())
            },
        }
        return (json.dumps(doc, ensure_ascii=False, indent=0, sort_keys=True) + "\n").encode("utf-8")


def _round_half_up(x: float) -> int:
    import math

    return int(math.floor(x + 0.5))


def stratified_split(
    records: Sequence[QueryRecord],
    test_frac: float,
    val_frac: float,
    seed: int,
    key=stratum_key,
) -> SplitAssignment:
    """Assign every record to train/validation/test, stratified by ``key``.

    Within each stratum of size n, round-half-up(n * frac) records go to
    test and to validation; the remainder trains. Strata smaller than 3
    records train wholesale. The shuffle is seeded per stratum from
    (seed, stratum key), so the assignment is independent of input order.
    """
    if not records:
        raise CorpusError("cannot split an empty record collection")
    if not (0.0 < test_frac + val_frac < 1.0):
        raise CorpusError(
            f"test_frac + val_frac must lie in (0, 1), got {test_frac + val_frac}"
        )
    ids = [r.id for r in records]
    if len(set(ids)) != len(ids):
        raise CorpusError("duplicate record ids; splits would be ambiguous")

    strata: dict[tuple, list[str]] = defaultdict(list)
    for record in records:
        strata[key(record)].append(record.id)

    partitions: dict[str, Partition] = {}
    for skey in sorted(strata):
        members = sorted(strata[skey])
        rng = random.Random(f"{seed}|{'|'.join(str(part) for part in skey)}")
        rng.shuffle(members)
        n = len(members)
        if n < 3:
            n_test = n_val = 0
        else:
            n_test = _round_half_up(n * test_frac)
            n_val = _round_half_up(n * val_frac)
        for rid in members[:n_test]:
            partitions[rid] = Partition.TEST
        for rid in members[n_test : n_test + n_val]:
            partitions[rid] = Partition.VALIDATION
        for rid in members[n_test + n_val :]:
            partitions[rid] = Partition.TRAIN

    return SplitAssignment(partitions=partitions, seed=seed)


def write_partition(
    records: Iterable[QueryRecord],
    assignment: SplitAssignment,
    partition: Partition,
    path: str | Path,
) -> int:
    """Write one partition as JSON Lines; returns the number of lines.

    Record order follows the input iterable, so output bytes are stable
    for a fixed input order. Creates an empty file for empty partitions.
    """
    path = Path(path)
    count = 0
    with path.open("w", encoding="utf-8") as fh:
        for record in records:
            assigned = assignment.partitions.get(record.id)
            if assigned is None:
                raise CorpusError(f"record {record.id!r} missing from split assignment")
            if assigned is not partition:
                continue
            fh.write(json.dumps(record.to_json_dict(), ensure_ascii=False) + "\n")
            count += 1
    return count


def read_jsonl(path: str | Path) -> list[QueryRecord]:
    """Load records from a partition/corpus JSONL file."""
    path = Path(path)
    if not path.exists():
        raise CorpusError(f"corpus file not found: {path}")
    records = []
    with path.open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(QueryRecord.from_json_dict(json.loads(line)))
    return records


def write_jsonl(records: Iterable[QueryRecord], path: str | Path) -> int:
    """Write records as JSON Lines in input order."""
    path = Path(path)
    count = 0
    with path.open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record.to_json_dict(), ensure_ascii=False) + "\n")
            count += 1
    return count
