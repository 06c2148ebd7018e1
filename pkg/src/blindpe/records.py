"""Annotation records: one rater's output for one segment.

Shared between spreadsheet ingest, the collection service and the analysis
stage. Serialized as JSON lines; records never carry origin information --
the blinding key is joined offline by the analysis stage only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import IO, Iterable

FLAG_NAMES = ("terminology", "omission", "typography")

_TRUE_CELLS = {"1", "x", "yes", "true"}
_FALSE_CELLS = {"", "0", "no", "false"}


class FlagValueError(ValueError):
    """A spreadsheet cell that is neither a recognised true nor false mark."""


def parse_flag_cell(cell: str) -> bool:
    """Spreadsheet flag cells are ``1``/empty, tolerating x/X/yes/true."""
    norm = cell.strip().lower()
    if norm in _TRUE_CELLS:
        return True
    if norm in _FALSE_CELLS:
        return False
    raise FlagValueError(f"unrecognised flag value {cell!r}")


@dataclass(frozen=True)
class ErrorFlags:
    """Presence indicators for the three error categories (not counts)."""

    terminology: bool = False
    omission: bool = False
    typography: bool = False

    def as_dict(self) -> dict[str, bool]:
        return {
            "terminology": self.terminology,
            "omission": self.omission,
            "typography": self.typography,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ErrorFlags":
        return cls(**{name: bool(d.get(name, False)) for name in FLAG_NAMES})


@dataclass(frozen=True)
class AnnotationRecord:
    segment_id: str
    rater_id: str
    postedited: str
    flags: ErrorFlags = field(default_factory=ErrorFlags)
    comment: str | None = None
    completed: bool = True
    submitted_at: str | None = None  # ISO-8601 UTC
    shown_target: str | None = None  # the pre-translation as shown; no origin info

    def as_dict(self) -> dict:
        return {
            "segment_id": self.segment_id,
            "rater_id": self.rater_id,
            "postedited": self.postedited,
            "flags": self.flags.as_dict(),
            "comment": self.comment,
            "completed": self.completed,
            "submitted_at": self.submitted_at,
            "target": self.shown_target,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AnnotationRecord":
        return cls(
            segment_id=d["segment_id"],
            rater_id=d["rater_id"],
            postedited=d["postedited"],
            flags=ErrorFlags.from_dict(d.get("flags", {})),
            comment=d.get("comment"),
            completed=bool(d.get("completed", True)),
            submitted_at=d.get("submitted_at"),
            shown_target=d.get("target"),
        )


def write_jsonl(records: Iterable[AnnotationRecord], stream: IO[str]) -> int:
    n = 0
    for record in records:
        stream.write(json.dumps(record.as_dict(), ensure_ascii=False) + "\n")
        n += 1
    return n


def read_jsonl(stream: IO[str] | str) -> list[AnnotationRecord]:
    if isinstance(stream, str):
        lines = stream.splitlines()
    else:
        lines = stream.read().splitlines()
    return [AnnotationRecord.from_dict(json.loads(line)) for line in lines if line.strip()]


def merge_records(records: Iterable[AnnotationRecord]) -> list[AnnotationRecord]:
    """Resolve duplicate (rater, segment) records: the later ``submitted_at``
    wins; records without a timestamp lose to timestamped ones."""
    current: dict[tuple[str, str], AnnotationRecord] = {}
    for record in records:
        key = (record.rater_id, record.segment_id)
        old = current.get(key)
        if old is None or (record.submitted_at or "") >= (old.submitted_at or ""):
            current[key] = record
    return list(current.values())


def mark_incomplete(record: AnnotationRecord) -> AnnotationRecord:
    return replace(record, completed=False)
