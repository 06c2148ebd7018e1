"""Operator command line: prepare, serve, ingest, analyze, report.

Exit codes: 0 success, 1 validation failure, 2 usage error. Seeds are
mandatory for prepare so that study materials are reproducible; rerunning
any command with identical inputs and flags is byte-identical (timestamp
header fields are suppressed under --reproducible).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from blindpe import __version__
from blindpe.analysis import (
    AnalysisConfig,
    analyze,
    emit_report,
    exclude_incomplete,
    results_csv,
    results_json,
    results_table_from_json,
)
from blindpe.corpus import CorpusFormatError, load_aligned, report_as_text, validate
from blindpe.ingest import ingest_files, validate_against_prepared
from blindpe.interleave import (
    BalanceScope,
    PreparationConfig,
    PreparationError,
    interleave,
    partition_sections,
    read_key,
    read_prepared,
    write_key,
    write_prepared,
)
from blindpe.metrics import EditThresholds
from blindpe.records import write_jsonl

KEY_FILENAME = "blinding_key.tsv"


def _err(message: str) -> None:
    print(f"error: {message}", file=sys.stderr)


def cmd_prepare(args) -> int:
    corpus_path = Path(args.corpus)
    try:
        raw = corpus_path.read_bytes()
        doc = load_aligned(raw.decode("utf-8"))
    except (OSError, UnicodeDecodeError, CorpusFormatError) as exc:
        _err(str(exc))
        return 1
    findings = validate(doc)
    if findings:
        sys.stderr.write(report_as_text(findings))
        return 1
    cfg = PreparationConfig(
        seed=args.seed,
        raters=tuple(args.raters),
        segments_per_rater=args.segments_per_rater,
        balance_scope=BalanceScope(args.balance_scope),
    )
    try:
        sections = partition_sections(doc, cfg)
    except PreparationError as exc:
        _err(str(exc))
        return 1
    prepared, key = interleave(doc, sections, cfg)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for pdoc in prepared:
        (out / f"prepared_{pdoc.rater_id}.tsv").write_text(
            write_prepared(pdoc), encoding="utf-8"
        )
    (out / KEY_FILENAME).write_text(write_key(key), encoding="utf-8")
    manifest = {
        "tool": {"name": "blindpe", "version": __version__},
        "seed": cfg.seed,
        "raters": list(cfg.raters),
        "segments_per_rater": cfg.segments_per_rater,
        "balance_scope": cfg.balance_scope.value,
        "language_pair": doc.language_pair,
        "corpus_digest": hashlib.sha256(raw).hexdigest(),
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2) + "\n", encoding="utf-8"
    )
    print(
        f"prepared {len(prepared)} raters x {cfg.segments_per_rater} segments "
        f"-> {out} (seed {cfg.seed})"
    )
    return 0


def cmd_ingest(args) -> int:
    try:
        records = ingest_files(args.files)
    except (OSError, CorpusFormatError) as exc:
        _err(str(exc))
        return 1
    if args.prepared_dir:
        valid_ids: set[str] = set()
        for path in Path(args.prepared_dir).glob("prepared_*.tsv"):
            pdoc = read_prepared(path.read_text(encoding="utf-8"), rater_id=path.stem)
            valid_ids.update(row.segment_id for row in pdoc.rows)
        unknown = validate_against_prepared(records, valid_ids)
        if unknown:
            _err("unknown segment ids: " + ", ".join(unknown))
            return 1
    with Path(args.out).open("w", encoding="utf-8") as fh:
        n = write_jsonl(records, fh)
    per_rater: dict[str, list[int]] = {}
    for record in records:
        done, total = per_rater.setdefault(record.rater_id, [0, 0])
        per_rater[record.rater_id] = [done + record.completed, total + 1]
    for rater, (done, total) in sorted(per_rater.items()):
        print(f"rater {rater}: {done} completed, {total - done} incomplete")
    print(f"ingested {n} records -> {args.out}")
    return 0


def _parse_thresholds(text: str) -> EditThresholds:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("thresholds must be 'edited,high_effort'")
    return EditThresholds(int(parts[0]), int(parts[1]))


def cmd_analyze(args) -> int:
    if not args.key:
        _err("refusing to analyze blinded data: --key is required")
        return 2
    try:
        from blindpe.records import read_jsonl

        records = read_jsonl(Path(args.annotations).read_text(encoding="utf-8"))
        key = read_key(Path(args.key).read_text(encoding="utf-8"))
    except (OSError, CorpusFormatError, ValueError) as exc:
        _err(str(exc))
        return 1
    missing = sorted({r.segment_id for r in records} - set(key.entries))
    if missing:
        _err("annotations reference ids absent from key: " + ", ".join(missing))
        return 1
    cfg = AnalysisConfig(alpha=args.alpha, thresholds=args.thresholds)
    try:
        ds, summary = exclude_incomplete(records, key, language_pair=args.language_pair)
        results = analyze(ds, cfg)
    except (PreparationError, ValueError) as exc:
        _err(str(exc))
        return 1
    for rater, (done, total) in sorted(summary.per_rater.items()):
        if done < total:
            print(f"# rater {rater}: {total - done} incomplete records excluded")
    for comp in results.comparisons:
        marker = " *" if comp.significant else ""
        print(
            f"{comp.name} HT {comp.ht.count}/{comp.ht.n} "
            f"MT {comp.mt.count}/{comp.mt.n} p={comp.fisher.p:.3f}{marker}"
        )
    formats = {"csv", "json", "figures"} if args.format == "all" else {args.format, "json"}
    written = emit_report(
        results,
        args.out,
        formats=formats,
        seed=key.seed,
        reproducible=args.reproducible,
    )
    print(f"wrote {len(written)} report files -> {args.out}")
    return 0


def cmd_report(args) -> int:
    try:
        payload = json.loads(Path(args.analysis).read_text(encoding="utf-8"))
        results = results_table_from_json(payload)
    except (OSError, ValueError, KeyError) as exc:
        _err(f"cannot read analysis JSON: {exc}")
        return 1
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    seed = payload.get("seed")
    if args.format == "csv":
        out.write_text(
            results_csv(results, seed=seed, reproducible=args.reproducible),
            encoding="utf-8",
        )
    else:
        out.write_text(
            results_json(results, seed=seed, reproducible=args.reproducible),
            encoding="utf-8",
        )
    print(f"wrote {out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from blindpe.service import create_app

    prepared = {}
    for path in sorted(Path(args.prepared_dir).glob("prepared_*.tsv")):
        rater_id = path.stem.removeprefix("prepared_")
        prepared[rater_id] = read_prepared(path.read_text(encoding="utf-8"), rater_id)
    if not prepared:
        _err(f"no prepared_*.tsv files in {args.prepared_dir}")
        return 1
    app = create_app(
        prepared,
        journal_path=args.journal,
        deadline_minutes=args.deadline_minutes,
        instructions=args.instructions,
        operator_token=args.operator_token,
        ui_dir=args.ui_dir,
    )
    print(f"serving {len(prepared)} raters on port {args.port}")
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blindpe", description=__doc__)
    parser.add_argument("--version", action="version", version=f"blindpe {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prepare", help="interleave a corpus into blinded rater documents")
    p.add_argument("--corpus", required=True)
    p.add_argument("--raters", required=True, type=lambda s: [r for r in s.split(",") if r])
    p.add_argument("--segments-per-rater", type=int, default=150)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument(
        "--balance-scope",
        choices=[s.value for s in BalanceScope],
        default=BalanceScope.PER_SECTION.value,
    )
    p.set_defaults(func=cmd_prepare)

    p = sub.add_parser("ingest", help="normalize filled spreadsheets or service exports")
    p.add_argument("files", nargs="+")
    p.add_argument("--out", required=True)
    p.add_argument("--prepared-dir", help="validate segment ids against prepared documents")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("analyze", help="unblind annotations and run the significance tests")
    p.add_argument("--annotations", required=True)
    p.add_argument("--key")
    p.add_argument("--out", required=True)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--thresholds", type=_parse_thresholds, default=EditThresholds())
    p.add_argument("--language-pair", default="und-und")
    p.add_argument("--format", choices=["csv", "json", "all"], default="all")
    p.add_argument("--reproducible", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("report", help="re-emit a report from a saved analysis JSON")
    p.add_argument("--analysis", required=True)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", required=True)
    p.add_argument("--reproducible", action="store_true")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="run the annotation collection service")
    p.add_argument("--prepared-dir", required=True)
    p.add_argument("--journal", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--deadline-minutes", type=int, default=90)
    p.add_argument("--instructions", default=None)
    p.add_argument("--operator-token", default=None)
    p.add_argument("--ui-dir", default=None)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "serve" and args.instructions is None:
        from blindpe.service import DEFAULT_INSTRUCTIONS

        args.instructions = DEFAULT_INSTRUCTIONS
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
