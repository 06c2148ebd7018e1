"""Segment-aligned tri-text corpora: one source text with both a human and a
machine translation per segment.

The canonical interchange format is a UTF-8 TSV with header
``id<TAB>source<TAB>ht<TAB>mt``. Tabs, newlines and backslashes inside cells
are escaped as ``\\t``, ``\\n`` and ``\\\\``. All text is NFC-normalized at
load time so downstream edit distances compare a single composition form.
"""

from __future__ import annotations

import io
import json
import unicodedata
from dataclasses import dataclass, field
from enum import Enum
from typing import IO, Iterable


class Origin(Enum):
    """Provenance of a target segment: human or machine translation."""

    HT = "HT"
    MT = "MT"


class CorpusFormatError(ValueError):
    """Malformed corpus input; carries the 1-based row number when known."""

    def __init__(self, message: str, row: int | None = None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class AlignedSegment:
    """One source segment with both of its translations."""

    id: str
    source: str
    ht: str
    mt: str


@dataclass(frozen=True)
class AlignedDocument:
    """An ordered, segment-aligned tri-text document.

    Segment order is the original document order; document-level context
    depends on it and it is preserved through every transformation.
    """

    language_pair: str
    segments: tuple[AlignedSegment, ...]
    metadata: dict[str, str] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.segments)

    def segment_ids(self) -> list[str]:
        return [s.id for s in self.segments]


@dataclass(frozen=True)
class Finding:
    """One validation finding. Findings are data, not failures."""

    severity: str
    segment_id: str
    message: str

    def as_line(self) -> str:
        return f"{self.severity}\t{self.segment_id}\t{self.message}"


ALIGNED_HEADER = ("id", "source", "ht", "mt")


def nfc(text: str) -> str:
    return unicodedata.normalize("NFC", text)


def escape_cell(text: str) -> str:
    return text.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n")


def unescape_cell(text: str) -> str:
    out = []
    it = iter(range(len(text)))
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\\" and i + 1 < len(text):
            nxt = text[i + 1]
            if nxt == "t":
                out.append("\t")
                i += 2
                continue
            if nxt == "n":
                out.append("\n")
                i += 2
                continue
            if nxt == "\\":
                out.append("\\")
                i += 2
                continue
        out.append(ch)
        i += 1
    return "".join(out)


def _decode_lines(stream: IO | str | Iterable[str]) -> list[str]:
    if isinstance(stream, str):
        data = stream
    else:
        raw = stream.read()
        if isinstance(raw, bytes):
            try:
                data = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                row = raw[: exc.start].count(b"\n") + 1
                raise CorpusFormatError(f"invalid UTF-8: {exc.reason}", row=row) from exc
        else:
            data = raw
    if data.startswith("\ufeff"):
        data = data[1:]
    return data.split("\n")


def load_aligned(stream: IO | str, language_pair: str | None = None) -> AlignedDocument:
    """Parse an aligned corpus TSV into an :class:`AlignedDocument`.

    ``#``-prefixed comment lines before the header are parsed as
    ``key: value`` metadata; a ``language_pair`` entry there (or the
    explicit argument, which wins) sets the document's language pair.

    Raises :class:`CorpusFormatError` with the offending row number on
    duplicate ids, missing/empty cells, wrong column counts, or invalid
    UTF-8 input.
    """
    lines = _decode_lines(stream)
    metadata: dict[str, str] = {}
    row_no = 0
    header_seen = False
    segments: list[AlignedSegment] = []
    seen_ids: set[str] = set()

    for line in lines:
        row_no += 1
        if line == "" and row_no == len(lines):
            break  # trailing newline
        if not header_seen and line.startswith("#"):
            body = line.lstrip("#").strip()
            if ":" in body:
                key, _, value = body.partition(":")
                metadata[key.strip()] = value.strip()
            continue
        cells = line.split("\t")
        if not header_seen:
            if tuple(cells) != ALIGNED_HEADER:
                raise CorpusFormatError(
                    f"expected header {'<TAB>'.join(ALIGNED_HEADER)!r}, got {line!r}",
                    row=row_no,
                )
            header_seen = True
            continue
        if len(cells) != 4:
            raise CorpusFormatError(
                f"expected 4 columns, found {len(cells)}", row=row_no
            )
        seg_id, source, ht, mt = (nfc(unescape_cell(c)) for c in cells)
        for name, value in (("id", seg_id), ("source", source), ("ht", ht), ("mt", mt)):
            if value == "":
                raise CorpusFormatError(f"empty {name!r} cell", row=row_no)
        if seg_id in seen_ids:
            raise CorpusFormatError(f"duplicate segment id {seg_id!r}", row=row_no)
        seen_ids.add(seg_id)
        segments.append(AlignedSegment(id=seg_id, source=source, ht=ht, mt=mt))

    if not header_seen:
        raise CorpusFormatError("missing header line", row=row_no)

    pair = language_pair or metadata.pop("language_pair", "und-und")
    return AlignedDocument(language_pair=pair, segments=tuple(segments), metadata=metadata)


def serialize(doc: AlignedDocument) -> str:
    """Inverse of :func:`load_aligned` on valid documents (byte-identical
    round trip after NFC)."""
    out = io.StringIO()
    out.write(f"# language_pair: {doc.language_pair}\n")
    for key, value in doc.metadata.items():
        out.write(f"# {key}: {value}\n")
    out.write("\t".join(ALIGNED_HEADER) + "\n")
    for seg in doc.segments:
        cells = (seg.id, seg.source, seg.ht, seg.mt)
        out.write("\t".join(escape_cell(c) for c in cells) + "\n")
    return out.getvalue()


def validate(doc: AlignedDocument) -> list[Finding]:
    """Check document invariants; empty report iff all hold."""
    findings: list[Finding] = []
    seen: set[str] = set()
    for seg in doc.segments:
        if seg.id == "":
            findings.append(Finding("error", seg.id, "empty segment id"))
        elif seg.id in seen:
            findings.append(Finding("error", seg.id, f"duplicate segment id {seg.id!r}"))
        seen.add(seg.id)
        for name, value in (("source", seg.source), ("ht", seg.ht), ("mt", seg.mt)):
            if value == "":
                findings.append(Finding("error", seg.id, f"empty {name} text"))
    return findings


def report_as_text(findings: list[Finding]) -> str:
    return "".join(f.as_line() + "\n" for f in findings)


def report_as_json(findings: list[Finding]) -> str:
    return json.dumps(
        [
            {"severity": f.severity, "segment_id": f.segment_id, "message": f.message}
            for f in findings
        ],
        ensure_ascii=False,
        indent=2,
    )
