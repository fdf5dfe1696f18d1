"""Single entry point driving every pipeline stage.

Subcommands: ingest, clean, split, evaluate, ablate, serve, ask. Every
run writes a RunManifest (inputs, config hash, seed, tool version,
timestamps) next to its primary output, so results can be traced back to
exactly what produced them.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .config import config_file_hash, load_config
from .corpus import (
    CorpusError,
    CorpusStats,
    Partition,
    iter_csv,
    read_jsonl,
    stratified_split,
    write_jsonl,
    write_partition,
)
from .evalharness import Attribute, ablate as run_ablation, join_pairs, render_report
from .metrics import MetricsError, evaluate_pairs, read_text_jsonl, render_report_text
from .modelgw import ProviderError, answer_pipeline
from .normalize import (
    default_ruleset,
    detect_runons,
    load_ruleset,
    normalize_text,
    write_flags,
)


def _write_manifest(
    primary_out: Path,
    subcommand: str,
    inputs: dict,
    config_path: str | None,
    seed: int | None,
    started: float,
) -> None:
    manifest = {
        "subcommand": subcommand,
        "inputs": {k: str(v) for k, v in inputs.items() if v is not None},
        "config_hash": config_file_hash(config_path),
        "seed": seed,
        "tool_version": __version__,
        "started_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(started)),
        "finished_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    path = primary_out.with_name(primary_out.name + ".manifest.json")
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")


def _ruleset(args) -> "NormalizationRuleSet":
    rules_dir = getattr(args, "rules", None)
    return load_ruleset(rules_dir) if rules_dir else default_ruleset()


def cmd_ingest(args) -> int:
    started = time.time()
    config = load_config(args.config) if args.config else load_config()
    stats = CorpusStats()
    out = Path(args.out)
    count = 0
    with out.open("w", encoding="utf-8") as fh:
        for record in iter_csv(args.input, config.schema_map, stats):
            fh.write(json.dumps(record.to_json_dict(), ensure_ascii=False) + "\n")
            count += 1
    stats_doc = stats.to_json_dict()
    out.with_name(out.name + ".stats.json").write_text(
        json.dumps(stats_doc, indent=2) + "\n", encoding="utf-8"
    )
    _write_manifest(out, "ingest", {"input": args.input, "out": out}, args.config, None, started)
    print(json.dumps(stats_doc, indent=2))
    if count == 0:
        print("error: no valid rows ingested", file=sys.stderr)
        return 1
    return 0


def cmd_clean(args) -> int:
    from dataclasses import replace

    started = time.time()
    rules = _ruleset(args)
    records = read_jsonl(args.infile)
    cleaned = [
        replace(
            record,
            query_text=normalize_text(record.query_text, rules),
            expert_answer=normalize_text(record.expert_answer, rules),
        )
        for record in records
    ]
    out = Path(args.out)
    write_jsonl(cleaned, out)
    if args.flags:
        corpus_texts = [(r.id, f"{r.query_text} {r.expert_answer}") for r in cleaned]
        flags = detect_runons(corpus_texts, threshold=args.runon_threshold)
        write_flags(flags, args.flags)
        print(f"wrote {len(flags)} run-on flags to {args.flags}")
    _write_manifest(out, "clean", {"in": args.infile, "out": out, "flags": args.flags},
                    None, None, started)
    print(f"cleaned {len(cleaned)} records -> {out}")
    return 0


def cmd_split(args) -> int:
    started = time.time()
    records = read_jsonl(args.infile)
    assignment = stratified_split(records, args.test, args.val, args.seed)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    counts = {}
    for partition in Partition:
        path = out_dir / f"{partition.value}.jsonl"
        counts[partition.value] = write_partition(records, assignment, partition, path)
    (out_dir / "assignment.json").write_bytes(assignment.to_json_bytes())
    _write_manifest(out_dir / "assignment.json", "split",
                    {"in": args.infile, "out_dir": out_dir}, None, args.seed, started)
    print(json.dumps(counts))
    return 0


def cmd_evaluate(args) -> int:
    started = time.time()
    report = evaluate_pairs(args.pred, args.ref, args.embeddings)
    out = Path(args.out)
    out.write_text(
        json.dumps(report.to_json_dict(), ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8",
    )
    _write_manifest(out, "evaluate",
                    {"pred": args.pred, "ref": args.ref, "embeddings": args.embeddings},
                    None, None, started)
    print(render_report_text(report), end="")
    return 0


def cmd_ablate(args) -> int:
    started = time.time()
    predictions = read_text_jsonl(args.pred)
    references = read_text_jsonl(args.ref)
    records = read_jsonl(args.corpus)
    attributes = []
    for name in args.by.split(","):
        name = name.strip()
        try:
            attributes.append(Attribute(name))
        except ValueError:
            print(f"error: unknown attribute {name!r} "
                  f"(expected sector, season, query_type)", file=sys.stderr)
            return 2
    pairs = join_pairs(predictions, references, records)
    report = run_ablation(pairs, attributes, min_subset_size=args.min_subset_size)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(render_report(report, "json"), encoding="utf-8")
    (out_dir / "report.txt").write_text(render_report(report, "table"), encoding="utf-8")
    _write_manifest(out_dir / "report.json", "ablate",
                    {"pred": args.pred, "ref": args.ref, "corpus": args.corpus, "by": args.by},
                    None, None, started)
    print(render_report(report, "table"), end="")
    return 0


def cmd_serve(args) -> int:
    from .service import run_service

    config = load_config(args.config, flags={"addr": args.addr or "", "log_path": args.log or ""})
    _, _, port = config.addr.rpartition(":")
    if not port.isdigit() or not 0 < int(port) < 65536:
        print(f"error: bad listen address {config.addr!r}", file=sys.stderr)
        return 1
    try:
        run_service(config)
    except (OSError, ValueError) as exc:
        print(f"error: cannot serve on {config.addr}: {exc}", file=sys.stderr)
        return 1
    return 0


def cmd_ask(args) -> int:
    config = load_config(args.config) if args.config else load_config()
    rules = load_ruleset(config.rules_dir) if config.rules_dir else default_ruleset()
    try:
        bundle = answer_pipeline(
            args.query, rules, config.gen, config.rephrase,
            rephrase_enabled=not args.no_rephrase,
        )
    except ProviderError as exc:
        print(f"error: generation failed: {exc}", file=sys.stderr)
        return 1
    doc = {
        "normalized_query": bundle.query_normalized,
        "raw_answer": bundle.raw_answer,
        "rephrased_answer": bundle.rephrased_answer,
        "rephrase_status": bundle.rephrase_status.value,
        "latency_generate_ms": round(bundle.latency_generate * 1000.0, 3),
        "latency_rephrase_ms": (
            round(bundle.latency_rephrase * 1000.0, 3)
            if bundle.latency_rephrase is not None else None
        ),
    }
    print(json.dumps(doc, ensure_ascii=False, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="agriqa",
        description="Helpline corpus pipeline: ingest, clean, split, evaluate, ablate, serve, ask.",
    )
    parser.add_argument("--version", action="version", version=f"agriqa {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("ingest", help="CSV export -> validated corpus JSONL")
    p.add_argument("--input", required=True, help="CSV file")
    p.add_argument("--out", required=True, help="output JSONL path")
    p.add_argument("--config", help="config file with [corpus] schema map")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("clean", help="normalize corpus text; flag run-on tokens")
    p.add_argument("--in", dest="infile", required=True, help="corpus JSONL")
    p.add_argument("--rules", help="rules directory (default: packaged rules)")
    p.add_argument("--out", required=True, help="normalized corpus JSONL")
    p.add_argument("--flags", help="run-on flags JSONL output")
    p.add_argument("--runon-threshold", type=float, default=2.0)
    p.set_defaults(func=cmd_clean)

    p = sub.add_parser("split", help="seeded stratified train/validation/test split")
    p.add_argument("--in", dest="infile", required=True, help="corpus JSONL")
    p.add_argument("--test", type=float, default=0.01)
    p.add_argument("--val", type=float, default=0.01)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("evaluate", help="score predictions against references")
    p.add_argument("--pred", required=True, help="predictions JSONL {id, text}")
    p.add_argument("--ref", required=True, help="references JSONL {id, text}")
    p.add_argument("--embeddings", help="embedding cache JSONL (enables BERTScore)")
    p.add_argument("--out", default="report.json")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("ablate", help="per-metadata-subset evaluation")
    p.add_argument("--pred", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--corpus", required=True, help="corpus JSONL with metadata")
    p.add_argument("--by", default="sector,season,query_type")
    p.add_argument("--min-subset-size", type=int, default=5)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("serve", help="run the HTTP query-resolution service")
    p.add_argument("--addr", help="host:port (default from config / AGRIQA_ADDR)")
    p.add_argument("--config")
    p.add_argument("--log", help="query log path")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("ask", help="resolve one query through the pipeline")
    p.add_argument("--query", required=True)
    p.add_argument("--no-rephrase", action="store_true")
    p.add_argument("--config")
    p.set_defaults(func=cmd_ask)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.subcommand == "ask" and not args.query.strip():
        parser.error("--query must be non-empty")
    try:
        return args.func(args)
    except (CorpusError, MetricsError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
