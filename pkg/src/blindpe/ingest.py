"""Ingest of rater work: filled spreadsheets (prepared-document TSVs with
their annotation columns filled in) and service JSON-lines exports, merged
into one normalized record set.

A spreadsheet row counts as completed iff its postedit cell is nonempty --
raters confirm unedited segments by copying the shown target, which keeps
"no edit" (MED 0) distinguishable from "not reached". Duplicate records for
the same (rater, segment) are resolved by submission timestamp, later wins.
"""

from __future__ import annotations

from datetime import datetime, timezone
from pathlib import Path

from blindpe.corpus import CorpusFormatError, nfc, unescape_cell
from blindpe.interleave import PREPARED_HEADER
from blindpe.records import (
    AnnotationRecord,
    ErrorFlags,
    FlagValueError,
    merge_records,
    parse_flag_cell,
    read_jsonl,
)

_FLAG_COLUMNS = {"terminology": 4, "omission": 5, "typography": 6}


def ingest_spreadsheet(
    text: str, rater_id: str, timestamp: str | None = None
) -> list[AnnotationRecord]:
    """Parse one filled spreadsheet into annotation records.

    ``timestamp`` (ISO-8601) is attached to every record since spreadsheets
    carry no per-row times; callers typically pass the file's mtime.
    """
    lines = text.split("\n")
    if not lines or tuple(lines[0].split("\t")) != PREPARED_HEADER:
        raise CorpusFormatError(
            "expected prepared-document header "
            + "<TAB>".join(PREPARED_HEADER),
            row=1,
        )
    records: list[AnnotationRecord] = []
    for row_no, line in enumerate(lines[1:], start=2):
        if line == "":
            continue
        cells = line.split("\t")
        if len(cells) != len(PREPARED_HEADER):
            raise CorpusFormatError(
                f"expected {len(PREPARED_HEADER)} columns, found {len(cells)}",
                row=row_no,
            )
        flags = {}
        for name, col in _FLAG_COLUMNS.items():
            try:
                flags[name] = parse_flag_cell(cells[col])
            except FlagValueError as exc:
                raise CorpusFormatError(f"column {name!r}: {exc}", row=row_no) from exc
        postedit = nfc(unescape_cell(cells[3]))
        target = nfc(unescape_cell(cells[2]))
        comment = nfc(unescape_cell(cells[7])) or None
        records.append(
            AnnotationRecord(
                segment_id=unescape_cell(cells[0]),
                rater_id=rater_id,
                postedited=postedit,
                flags=ErrorFlags(**flags),
                comment=comment,
                completed=postedit != "",
                submitted_at=timestamp,
                shown_target=target,
            )
        )
    return records


def _file_mtime_iso(path: Path) -> str:
    return datetime.fromtimestamp(path.stat().st_mtime, tz=timezone.utc).isoformat()


def rater_id_from_filename(path: Path) -> str:
    """prepared_<rater>.tsv -> <rater>; otherwise the bare stem."""
    stem = path.stem
    return stem.removeprefix("prepared_").removeprefix("filled_")


def ingest_file(path: str | Path, rater_id: str | None = None) -> list[AnnotationRecord]:
    """Ingest one spreadsheet TSV or service-export JSONL file."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix in (".jsonl", ".ndjson", ".json"):
        return read_jsonl(text)
    return ingest_spreadsheet(
        text,
        rater_id=rater_id or rater_id_from_filename(path),
        timestamp=_file_mtime_iso(path),
    )


def ingest_files(paths: list[str | Path]) -> list[AnnotationRecord]:
    """Ingest and merge several sources, resolving duplicates by timestamp."""
    records: list[AnnotationRecord] = []
    for path in paths:
        records.extend(ingest_file(path))
    return sorted(
        merge_records(records), key=lambda r: (r.rater_id, r.segment_id)
    )


def validate_against_prepared(
    records: list[AnnotationRecord], valid_ids: set[str]
) -> list[str]:
    """Segment ids present in records but unknown to the prepared study."""
    return sorted({r.segment_id for r in records} - valid_ids)
