"""Session-scoped collection of rater annotations over HTTP.

Serves blinded segments to raters, accepts post-edits/flags/comments,
enforces the session deadline server-side, and persists every submission to
an append-only JSON-lines journal that is replayed on startup. No endpoint
ever exposes origin information; the blinding key never reaches this
process.

The clock is injectable for tests: pass ``clock=`` to :func:`create_app`,
or set the ``BLINDPE_CLOCK_FILE`` environment variable to a file containing
a Unix epoch float (used by end-to-end tests to advance time).
"""

from __future__ import annotations

import json
import os
import threading
import time
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

from fastapi import FastAPI, HTTPException, Request, Response

from blindpe.interleave import PreparedDocument
from blindpe.records import AnnotationRecord, ErrorFlags, merge_records

DEFAULT_DEADLINE_MINUTES = 90
DEFAULT_INSTRUCTIONS = (
    "This translation was produced by a machine translation system. "
    "Post-edit each segment: correct spelling and grammatical errors, but not style. "
    "Flag the presence of terminology, omission, or typography errors, and leave a "
    "comment if you wish."
)


def _iso(ts: float) -> str:
    return datetime.fromtimestamp(ts, tz=timezone.utc).isoformat()


def file_clock(path: str | Path) -> Callable[[], float]:
    def now() -> float:
        return float(Path(path).read_text().strip())

    return now


@dataclass
class Session:
    token: str
    rater_id: str
    started_at: float
    deadline: float
    cursor: int = 0
    finished: bool = False

    def state(self, now: float) -> str:
        if self.finished:
            return "finished"
        return "active" if now < self.deadline else "expired"


class Journal:
    """Append-only JSON-lines journal with a single writer and atomic line
    appends. Entries: session, submit, late."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.path.touch(exist_ok=True)

    def append(self, entry: dict) -> None:
        line = json.dumps(entry, ensure_ascii=False) + "\n"
        with self._lock:
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(line)
                fh.flush()
                os.fsync(fh.fileno())

    def replay(self) -> list[dict]:
        entries = []
        with self.path.open(encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    entries.append(json.loads(line))
        return entries


class CollectionState:
    """In-memory study state backed by the journal."""

    def __init__(
        self,
        prepared: dict[str, PreparedDocument],
        journal: Journal,
        deadline_minutes: int,
        clock: Callable[[], float],
    ):
        self.prepared = prepared
        self.journal = journal
        self.deadline_minutes = deadline_minutes
        self.clock = clock
        self.sessions: dict[str, Session] = {}
        self.by_rater: dict[str, str] = {}
        # current record per (rater, segment); last write wins
        self.current: dict[tuple[str, str], AnnotationRecord] = {}
        self.lock = threading.Lock()
        for entry in journal.replay():
            self._apply(entry)

    def _apply(self, entry: dict) -> None:
        kind = entry.get("type")
        if kind == "submit":
            record = AnnotationRecord.from_dict(entry["record"])
            self.current[(record.rater_id, record.segment_id)] = record
        # late submissions stay journaled but never enter the current set

    def snapshot(self) -> list[AnnotationRecord]:
        with self.lock:
            return merge_records(self.current.values())


def create_app(
    prepared: dict[str, PreparedDocument],
    journal_path: str | Path,
    deadline_minutes: int = DEFAULT_DEADLINE_MINUTES,
    instructions: str = DEFAULT_INSTRUCTIONS,
    operator_token: str | None = None,
    clock: Callable[[], float] | None = None,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    if clock is None:
        clock_file = os.environ.get("BLINDPE_CLOCK_FILE")
        clock = file_clock(clock_file) if clock_file else time.time
    if deadline_minutes < 1:
        raise ValueError("deadline_minutes must be >= 1")

    state = CollectionState(prepared, Journal(journal_path), deadline_minutes, clock)
    app = FastAPI(title="blindpe collection service")
    app.state.collection = state

    def get_session(token: str) -> Session:
        session = state.sessions.get(token)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session token")
        return session

    @app.post("/sessions")
    def create_session(body: dict):
        rater_id = body.get("rater_id")
        if not rater_id or rater_id not in state.prepared:
            raise HTTPException(status_code=404, detail="no prepared document for rater")
        now = clock()
        with state.lock:
            existing = state.by_rater.get(rater_id)
            if existing and state.sessions[existing].state(now) == "active":
                raise HTTPException(status_code=409, detail="rater already has an active session")
            session = Session(
                token=uuid.uuid4().hex,
                rater_id=rater_id,
                started_at=now,
                deadline=now + state.deadline_minutes * 60,
            )
            state.sessions[session.token] = session
            state.by_rater[rater_id] = session.token
        state.journal.append(
            {
                "type": "session",
                "token": session.token,
                "rater_id": rater_id,
                "started_at": _iso(now),
                "deadline": _iso(session.deadline),
            }
        )
        return {
            "token": session.token,
            "started_at": _iso(now),
            "deadline": _iso(session.deadline),
            "total": len(state.prepared[rater_id].rows),
            "instructions": instructions,
        }

    @app.get("/sessions/{token}/status")
    def session_status(token: str):
        session = get_session(token)
        now = clock()
        doc = state.prepared[session.rater_id]
        with state.lock:
            completed = sum(
                1 for (rater, _seg) in state.current if rater == session.rater_id
            )
        return {
            "state": session.state(now),
            "position": session.cursor + 1,
            "total": len(doc.rows),
            "completed": completed,
            "remaining_seconds": max(0, int(session.deadline - now)),
        }

    @app.get("/sessions/{token}/tasks/{index}")
    def get_task(token: str, index: int):
        session = get_session(token)
        now = clock()
        if session.state(now) != "active":
            raise HTTPException(status_code=410, detail={"state": session.state(now)})
        doc = state.prepared[session.rater_id]
        if not 0 <= index < len(doc.rows):
            raise HTTPException(status_code=404, detail="task index out of range")
        row = doc.rows[index]
        return {
            "segment_id": row.segment_id,
            "source": row.source,
            "target": row.target,
            "position": index + 1,
            "total": len(doc.rows),
            "remaining_seconds": max(0, int(session.deadline - now)),
        }

    @app.put("/sessions/{token}/tasks/{index}")
    def submit_annotation(token: str, index: int, body: dict):
        session = get_session(token)
        now = clock()
        doc = state.prepared[session.rater_id]
        if not 0 <= index < len(doc.rows):
            raise HTTPException(status_code=404, detail="task index out of range")
        row = doc.rows[index]
        record = AnnotationRecord(
            segment_id=row.segment_id,
            rater_id=session.rater_id,
            postedited=body.get("postedit", row.target),
            flags=ErrorFlags.from_dict(body.get("flags", {})),
            comment=body.get("comment") or None,
            completed=True,
            submitted_at=_iso(now),
            shown_target=row.target,
        )
        if session.state(now) != "active":
            state.journal.append({"type": "late", "record": record.as_dict()})
            raise HTTPException(status_code=410, detail={"state": session.state(now), "journaled": "late"})
        state.journal.append({"type": "submit", "record": record.as_dict()})
        with state.lock:
            state.current[(record.rater_id, record.segment_id)] = record
            session.cursor = max(session.cursor, index + 1)
            submitted = sum(1 for (rater, _seg) in state.current if rater == session.rater_id)
            if submitted >= len(doc.rows):
                session.finished = True
        return {"status": "ok", "segment_id": record.segment_id, "submitted_at": record.submitted_at}

    @app.get("/export")
    def export(request: Request):
        if operator_token is not None:
            supplied = request.headers.get("x-operator-token") or request.query_params.get("token")
            if supplied != operator_token:
                raise HTTPException(status_code=403, detail="operator token required")
        lines = [
            json.dumps(record.as_dict(), ensure_ascii=False)
            for record in sorted(
                state.snapshot(), key=lambda r: (r.rater_id, r.segment_id)
            )
        ]
        return Response(
            content="".join(line + "\n" for line in lines),
            media_type="application/x-ndjson",
        )

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
