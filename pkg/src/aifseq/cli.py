"""Command-line surface: ingestion, classification, sequencing as batch runs.

Subcommands: ``taxonomy`` (show/export), ``validate-mapping``, ``classify``,
``sequence``. Runs are reproducible: every resolved setting lands in a
``manifest.json`` next to the outputs, record outputs are newline-delimited
JSON or RFC-4180 CSV, and output bytes depend only on inputs and config
(the manifest's ``generated_at`` is the one wall-clock field).

Exit codes: 0 success, 2 usage, 3 input I/O, 4 invalid mapping or
taxonomy, 5 input unsorted beyond the skew window.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

from aifseq import __version__
from aifseq.classify import (
    MappingError,
    classify_stream,
    coverage_report,
    load_mapping,
    starter_mapping_document,
)
from aifseq.ingest import (
    EVE_FORMAT,
    SNORT_FAST_FORMAT,
    FormatDetectionError,
    read_alert_stream,
)
from aifseq.sequence import (
    OutOfOrderError,
    build_sequences,
    sequence_similarity,
    sequence_to_document,
    transition_matrix,
)
from aifseq.taxonomy import TaxonomyError, builtin_taxonomy, load_taxonomy, to_document

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_INVALID = 4
EXIT_ORDER = 5

_FORMATS = {"eve": EVE_FORMAT, "fast": SNORT_FAST_FORMAT, "auto": "auto"}
_KEYS = {"src": "src", "src-dst": "src_dst"}


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _non_negative_float(text: str) -> float:
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def _add_input_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--input", required=True, help="alert file to read")
    sub.add_argument(
        "--format",
        choices=sorted(_FORMATS),
        default="auto",
        help="input format (auto: first line starting with '{' means eve)",
    )
    sub.add_argument(
        "--assumed-year",
        type=int,
        default=None,
        help="year for fast-format timestamps (the format carries none); required for fast input",
    )
    sub.add_argument("--mapping", default=None, help="mapping JSON (default: builtin starter)")
    sub.add_argument("--taxonomy", default=None, help="taxonomy JSON (default: builtin)")
    sub.add_argument("--out", required=True, help="output directory")
    sub.add_argument("--output-format", choices=["json", "csv"], default="json")
    sub.add_argument(
        "--include-unclassified",
        action="store_true",
        help="keep sentinel verdicts in sequence outputs",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aifseq",
        description="Classify IDS alerts into action-intent states and extract attacker sequences.",
    )
    parser.add_argument("--version", action="version", version=f"aifseq {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    tax = commands.add_parser("taxonomy", help="show or export the active taxonomy")
    tax_sub = tax.add_subparsers(dest="taxonomy_command", required=True)
    show = tax_sub.add_parser("show", help="list macro groups and their micro states")
    show.add_argument("--taxonomy", default=None)
    show.add_argument("--macro", default=None, help="limit the listing to one macro group")
    show.set_defaults(handler=_cmd_taxonomy_show)
    export = tax_sub.add_parser("export", help="write the taxonomy document as JSON")
    export.add_argument("--taxonomy", default=None)
    export.add_argument("-o", "--output", required=True)
    export.set_defaults(handler=_cmd_taxonomy_export)

    validate = commands.add_parser("validate-mapping", help="check a mapping document")
    validate.add_argument("--mapping", required=True)
    validate.add_argument("--taxonomy", default=None)
    validate.set_defaults(handler=_cmd_validate_mapping)

    classify = commands.add_parser("classify", help="classify an alert file")
    _add_input_args(classify)
    classify.set_defaults(handler=_cmd_classify)

    sequence = commands.add_parser("sequence", help="extract per-attacker sequences")
    _add_input_args(sequence)
    sequence.add_argument(
        "--gap-seconds",
        type=_non_negative_float,
        default=600.0,
        help="episode boundary: split where the gap exceeds this (default 600)",
    )
    sequence.add_argument(
        "--skew-seconds",
        type=_non_negative_float,
        default=5.0,
        help="re-sort window for slightly out-of-order input (default 5)",
    )
    sequence.add_argument("--key", choices=sorted(_KEYS), default="src")
    sequence.add_argument(
        "--transitions",
        choices=["micro", "macro", "both"],
        default=None,
        help="also write transition matrix CSVs at this level",
    )
    sequence.add_argument(
        "--similarity",
        choices=["lcs", "ngram"],
        default=None,
        help="also write pairwise attacker similarity CSV",
    )
    sequence.add_argument("--ngram-n", type=_positive_int, default=2)
    sequence.add_argument(
        "--uncollapsed-transitions",
        action="store_true",
        help="count transitions on raw step lists instead of collapsed runs",
    )
    sequence.set_defaults(handler=_cmd_sequence)
    return parser


def _load_active_taxonomy(path: str | None):
    return load_taxonomy(path) if path else builtin_taxonomy()


def _load_mapping_spec(path: str | None, taxonomy):
    if path is None:
        return load_mapping(starter_mapping_document(), taxonomy), "builtin:starter"
    text = Path(path).read_text(encoding="utf-8")
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MappingError([f"{path} is not valid JSON: {exc}"]) from None
    return load_mapping(document, taxonomy), path


def _cmd_taxonomy_show(args: argparse.Namespace) -> int:
    taxonomy = _load_active_taxonomy(args.taxonomy)
    macros = taxonomy.macro_keys()
    if args.macro is not None:
        if not taxonomy.has("macro", args.macro):
            print(f"error: unknown macro {args.macro!r}", file=sys.stderr)
            return EXIT_USAGE
        macros = [args.macro]
    else:
        print(
            f"taxonomy {taxonomy.version}: {len(taxonomy.macros)} macro states, "
            f"{len(taxonomy.micros)} micro states"
        )
    for macro_key in macros:
        record = taxonomy.describe("macro", macro_key)
        print(f"{macro_key}: {record.display_name}")
        for micro_key in taxonomy.micros_of(macro_key):
            micro = taxonomy.describe("micro", micro_key)
            print(f"  - {micro_key}: {micro.display_name}")
    return EXIT_OK


def _cmd_taxonomy_export(args: argparse.Namespace) -> int:
    taxonomy = _load_active_taxonomy(args.taxonomy)
    path = Path(args.output)
    path.write_text(json.dumps(to_document(taxonomy), indent=2) + "\n", encoding="utf-8")
    print(f"wrote {path}")
    return EXIT_OK


def _cmd_validate_mapping(args: argparse.Namespace) -> int:
    taxonomy = _load_active_taxonomy(args.taxonomy)
    try:
        spec, _ = _load_mapping_spec(args.mapping, taxonomy)
    except MappingError as exc:
        for finding in exc.findings:
            print(f"finding: {finding}", file=sys.stderr)
        return EXIT_INVALID
    print(f"mapping OK: {len(spec.rules)} rules, spec_version {spec.spec_version}")
    return EXIT_OK


def _read_classified(args: argparse.Namespace):
    taxonomy = _load_active_taxonomy(args.taxonomy)
    spec, mapping_source = _load_mapping_spec(args.mapping, taxonomy)
    fmt = _FORMATS[args.format]
    if fmt == SNORT_FAST_FORMAT and args.assumed_year is None:
        raise FormatDetectionError("--format fast requires --assumed-year")
    alerts, stats = read_alert_stream(args.input, fmt, args.assumed_year)
    pairs = list(classify_stream(alerts, spec, taxonomy))
    return taxonomy, spec, mapping_source, pairs, stats


def _classification_record(alert, verdict) -> dict:
    return {
        "alert_ref": str(alert.raw_ref),
        "ts": alert.timestamp.isoformat(),
        "src_ip": alert.src_ip,
        "src_port": alert.src_port,
        "dst_ip": alert.dst_ip,
        "dst_port": alert.dst_port,
        "protocol": alert.protocol,
        "gid": alert.generator_id,
        "sid": alert.signature_id,
        "rev": alert.revision,
        "msg": alert.signature_msg,
        "category": alert.category,
        "severity": alert.severity,
        "micro": verdict.micro,
        "macro": verdict.macro,
        "matched_rule": verdict.matched_rule,
        "confidence": verdict.confidence,
    }


def _write_ndjson(path: Path, records) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, separators=(",", ":")) + "\n")


def _write_csv(path: Path, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        csv.writer(fh).writerows(rows)


def _write_manifest(out_dir: Path, command: str, config: dict, stats, outputs: list[str]) -> None:
    manifest = {
        "tool": f"aifseq {__version__}",
        "command": command,
        "config": config,
        "ingest_stats": stats.to_dict(),
        "outputs": outputs,
        "generated_at": datetime.now(timezone.utc).isoformat(),
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2) + "\n", encoding="utf-8"
    )


def _base_config(args: argparse.Namespace, taxonomy, spec, mapping_source: str) -> dict:
    return {
        "input": args.input,
        "format": args.format,
        "assumed_year": args.assumed_year,
        "mapping": mapping_source,
        "taxonomy": args.taxonomy or "builtin",
        "taxonomy_version": taxonomy.version,
        "spec_version": spec.spec_version,
        "default_confidence": spec.default_confidence,
        "output_format": args.output_format,
        "include_unclassified": args.include_unclassified,
    }


def _cmd_classify(args: argparse.Namespace) -> int:
    taxonomy, spec, mapping_source, pairs, stats = _read_classified(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = [_classification_record(alert, verdict) for alert, verdict in pairs]

    outputs = []
    if args.output_format == "json":
        _write_ndjson(out_dir / "classifications.ndjson", records)
        outputs.append("classifications.ndjson")
    else:
        columns = [
            "alert_ref", "ts", "src_ip", "src_port", "dst_ip", "dst_port", "protocol",
            "gid", "sid", "rev", "msg", "category", "severity", "micro", "macro",
            "matched_rule", "confidence",
        ]
        rows = [columns, *[[record[c] for c in columns] for record in records]]
        _write_csv(out_dir / "classifications.csv", rows)
        outputs.append("classifications.csv")

    report = coverage_report(spec, [verdict for _, verdict in pairs])
    (out_dir / "coverage.json").write_text(
        json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8"
    )
    outputs.append("coverage.json")

    config = _base_config(args, taxonomy, spec, mapping_source)
    _write_manifest(out_dir, "classify", config, stats, outputs)
    print(
        f"classified {report.total} alerts "
        f"({report.unclassified_fraction:.3f} unclassified fraction) -> {out_dir}"
    )
    return EXIT_OK


def _sequence_csv_rows(docs: list[dict]) -> list[list]:
    rows: list[list] = [
        ["key", "episode", "start", "end", "step", "ts", "micro", "macro", "run_length", "alert_ref"]
    ]
    for doc in docs:
        for ep_index, episode in enumerate(doc["episodes"]):
            for step_index, step in enumerate(episode["steps"]):
                rows.append(
                    [
                        doc["key"],
                        ep_index,
                        episode["start"],
                        episode["end"],
                        step_index,
                        step["ts"],
                        step["micro"],
                        step["macro"],
                        step["run_length"],
                        step["alert_ref"],
                    ]
                )
    return rows


def _cmd_sequence(args: argparse.Namespace) -> int:
    taxonomy, spec, mapping_source, pairs, stats = _read_classified(args)
    sequences = build_sequences(
        pairs,
        key_config=_KEYS[args.key],
        gap_threshold=args.gap_seconds,
        include_unclassified=args.include_unclassified,
        skew_seconds=args.skew_seconds,
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    docs = [sequence_to_document(seq) for seq in sequences]

    outputs = []
    if args.output_format == "json":
        _write_ndjson(out_dir / "sequences.ndjson", docs)
        outputs.append("sequences.ndjson")
    else:
        _write_csv(out_dir / "sequences.csv", _sequence_csv_rows(docs))
        outputs.append("sequences.csv")

    if args.transitions:
        levels = ["micro", "macro"] if args.transitions == "both" else [args.transitions]
        for level in levels:
            matrix = transition_matrix(
                sequences, level, collapsed=not args.uncollapsed_transitions
            )
            name = f"transitions_{level}.csv"
            _write_csv(out_dir / name, matrix.to_rows())
            outputs.append(name)

    if args.similarity:
        method = "lcs_ratio" if args.similarity == "lcs" else "ngram_jaccard"
        rows: list[list] = [["key_a", "key_b", "method", "score"]]
        for i, left in enumerate(sequences):
            for right in sequences[i + 1 :]:
                score = sequence_similarity(left, right, method, n=args.ngram_n)
                rows.append([left.key.label(), right.key.label(), method, f"{score:.6f}"])
        _write_csv(out_dir / "similarity.csv", rows)
        outputs.append("similarity.csv")

    config = _base_config(args, taxonomy, spec, mapping_source)
    config.update(
        {
            "gap_seconds": args.gap_seconds,
            "skew_seconds": args.skew_seconds,
            "key": args.key,
            "transitions": args.transitions,
            "similarity": args.similarity,
            "ngram_n": args.ngram_n,
            "uncollapsed_transitions": args.uncollapsed_transitions,
        }
    )
    _write_manifest(out_dir, "sequence", config, stats, outputs)
    print(f"wrote {len(sequences)} sequences -> {out_dir}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except TaxonomyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except MappingError as exc:
        for finding in exc.findings:
            print(f"finding: {finding}", file=sys.stderr)
        return EXIT_INVALID
    except OutOfOrderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ORDER
    except FormatDetectionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
