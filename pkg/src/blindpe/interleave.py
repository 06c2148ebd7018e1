"""Blinded materials preparation: split a document into consecutive rater
sections and randomly interleave HT and MT targets under a balance
constraint, emitting per-rater documents plus a separately stored key.

Randomization is a seeded PCG64 stream (numpy ``default_rng``); the stream
for each section is derived from ``SeedSequence([seed, section_index])`` so
preparation is deterministic and independent of threading. Balanced
selection shuffles a half-HT/half-MT label vector rather than flipping
independent coins, so every even-sized scope splits exactly 50/50 and odd
scopes differ by one (majority side chosen by the same stream).
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from blindpe.corpus import (
    AlignedDocument,
    CorpusFormatError,
    Origin,
    escape_cell,
    unescape_cell,
)
from blindpe.records import AnnotationRecord

PREPARED_HEADER = (
    "id",
    "source",
    "target",
    "postedit",
    "terminology",
    "omission",
    "typography",
    "comment",
)

KEY_HEADER = ("id", "origin", "rater")


class BalanceScope(Enum):
    PER_SECTION = "per_section"
    WHOLE_DOCUMENT = "whole_document"


@dataclass(frozen=True)
class PreparationConfig:
    seed: int
    raters: tuple[str, ...]
    segments_per_rater: int = 150
    balance_scope: BalanceScope = BalanceScope.PER_SECTION

    def __post_init__(self):
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.segments_per_rater < 1:
            raise ValueError("segments_per_rater must be >= 1")
        if not self.raters or len(set(self.raters)) != len(self.raters):
            raise ValueError("raters must be nonempty and unique")


@dataclass(frozen=True)
class RaterSection:
    rater_id: str
    start_index: int
    count: int


@dataclass(frozen=True)
class PreparedRow:
    segment_id: str
    source: str
    target: str


@dataclass(frozen=True)
class PreparedDocument:
    """One rater's blinded document: source plus a single unlabelled target."""

    rater_id: str
    rows: tuple[PreparedRow, ...]


@dataclass(frozen=True)
class KeyEntry:
    origin: Origin
    rater_id: str


@dataclass(frozen=True)
class BlindingKey:
    seed: int
    entries: dict[str, KeyEntry] = field(default_factory=dict)


@dataclass(frozen=True)
class UnblindedRecord:
    """An annotation record joined with its origin and the text shown to
    the rater."""

    record: AnnotationRecord
    origin: Origin
    shown_target: str | None = None


class PreparationError(ValueError):
    pass


def partition_sections(doc: AlignedDocument, cfg: PreparationConfig) -> list[RaterSection]:
    """Assign each rater a consecutive, disjoint block of segments in
    document order."""
    needed = len(cfg.raters) * cfg.segments_per_rater
    if needed > len(doc):
        raise PreparationError(
            f"document too short: need {needed}, have {len(doc)} segments"
        )
    return [
        RaterSection(rater_id=rater, start_index=i * cfg.segments_per_rater, count=cfg.segments_per_rater)
        for i, rater in enumerate(cfg.raters)
    ]


def _balanced_labels(n: int, rng: np.random.Generator) -> np.ndarray:
    """A shuffled vector of n origin labels, 0 = HT, 1 = MT, split as evenly
    as n allows (odd n: extra label chosen by the stream)."""
    half = n // 2
    labels = [0] * half + [1] * half
    if n % 2:
        labels.append(int(rng.integers(2)))
    arr = np.array(labels, dtype=np.int8)
    rng.shuffle(arr)
    return arr


def interleave(
    doc: AlignedDocument, sections: list[RaterSection], cfg: PreparationConfig
) -> tuple[list[PreparedDocument], BlindingKey]:
    """Produce one blinded document per section plus the blinding key.

    Deterministic in (doc, sections, cfg.seed); prepared rows carry the
    chosen origin's text verbatim and no origin information.
    """
    for sec in sections:
        if sec.start_index < 0 or sec.start_index + sec.count > len(doc):
            raise PreparationError(
                f"section for rater {sec.rater_id!r} exceeds document bounds"
            )

    if cfg.balance_scope is BalanceScope.WHOLE_DOCUMENT:
        total = sum(sec.count for sec in sections)
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed]))
        all_labels = _balanced_labels(total, rng)
        offsets = np.cumsum([0] + [sec.count for sec in sections])
        per_section = [all_labels[offsets[i] : offsets[i + 1]] for i in range(len(sections))]
    else:
        per_section = [
            _balanced_labels(
                sec.count, np.random.default_rng(np.random.SeedSequence([cfg.seed, i]))
            )
            for i, sec in enumerate(sections)
        ]

    prepared: list[PreparedDocument] = []
    entries: dict[str, KeyEntry] = {}
    for sec, labels in zip(sections, per_section):
        rows = []
        for offset, label in enumerate(labels):
            seg = doc.segments[sec.start_index + offset]
            origin = Origin.MT if label else Origin.HT
            target = seg.mt if origin is Origin.MT else seg.ht
            rows.append(PreparedRow(segment_id=seg.id, source=seg.source, target=target))
            entries[seg.id] = KeyEntry(origin=origin, rater_id=sec.rater_id)
        prepared.append(PreparedDocument(rater_id=sec.rater_id, rows=tuple(rows)))

    return prepared, BlindingKey(seed=cfg.seed, entries=entries)


def unblind(records: list[AnnotationRecord], key: BlindingKey) -> list[UnblindedRecord]:
    """Join annotation records with their origins from the blinding key."""
    joined = []
    for record in records:
        entry = key.entries.get(record.segment_id)
        if entry is None:
            raise PreparationError(f"segment id {record.segment_id!r} not in blinding key")
        if record.rater_id != entry.rater_id:
            raise PreparationError(
                f"rater mismatch for segment {record.segment_id!r}: "
                f"record {record.rater_id!r}, key {entry.rater_id!r}"
            )
        joined.append(
            UnblindedRecord(
                record=record, origin=entry.origin, shown_target=record.shown_target
            )
        )
    return joined


# --- serialization -----------------------------------------------------------


def write_prepared(doc: PreparedDocument) -> str:
    """Prepared-document TSV: the rater's working spreadsheet, annotation
    columns empty."""
    out = io.StringIO()
    out.write("\t".join(PREPARED_HEADER) + "\n")
    for row in doc.rows:
        cells = [row.segment_id, row.source, row.target, "", "", "", "", ""]
        out.write("\t".join(escape_cell(c) for c in cells) + "\n")
    return out.getvalue()


def read_prepared(text: str, rater_id: str) -> PreparedDocument:
    lines = text.split("\n")
    if not lines or tuple(lines[0].split("\t")) != PREPARED_HEADER:
        raise CorpusFormatError("missing or malformed prepared-document header", row=1)
    rows = []
    for row_no, line in enumerate(lines[1:], start=2):
        if line == "":
            continue
        cells = line.split("\t")
        if len(cells) != len(PREPARED_HEADER):
            raise CorpusFormatError(
                f"expected {len(PREPARED_HEADER)} columns, found {len(cells)}", row=row_no
            )
        rows.append(
            PreparedRow(
                segment_id=unescape_cell(cells[0]),
                source=unescape_cell(cells[1]),
                target=unescape_cell(cells[2]),
            )
        )
    return PreparedDocument(rater_id=rater_id, rows=tuple(rows))


def write_key(key: BlindingKey) -> str:
    out = io.StringIO()
    out.write(f"# seed: {key.seed}\n")
    out.write("\t".join(KEY_HEADER) + "\n")
    for seg_id, entry in key.entries.items():
        out.write(
            "\t".join(
                (escape_cell(seg_id), entry.origin.value, escape_cell(entry.rater_id))
            )
            + "\n"
        )
    return out.getvalue()


def read_key(text: str) -> BlindingKey:
    seed = 0
    entries: dict[str, KeyEntry] = {}
    header_seen = False
    for row_no, line in enumerate(text.split("\n"), start=1):
        if line == "":
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            if body.startswith("seed:"):
                seed = int(body.partition(":")[2].strip())
            continue
        cells = line.split("\t")
        if not header_seen:
            if tuple(cells) != KEY_HEADER:
                raise CorpusFormatError("malformed blinding key header", row=row_no)
            header_seen = True
            continue
        if len(cells) != 3:
            raise CorpusFormatError(f"expected 3 columns, found {len(cells)}", row=row_no)
        entries[unescape_cell(cells[0])] = KeyEntry(
            origin=Origin(cells[1]), rater_id=unescape_cell(cells[2])
        )
    return BlindingKey(seed=seed, entries=entries)
