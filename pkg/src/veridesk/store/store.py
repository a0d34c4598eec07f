"""SQLite-backed append-only event store.

One file holds everything: events, case snapshots, generation transcripts,
idempotency records, and staged submissions. Appends run under BEGIN
IMMEDIATE so compare-and-append is atomic; every append replays the case
from its events and applies the new one through the workflow engine, so
nothing the engine would reject can ever be persisted.

``load_case`` always replays from events; the snapshot table is a stored
materialization kept for coherence checks and external inspection, never
the source of truth.
"""

from __future__ import annotations

import json
import sqlite3
import threading
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Iterator

from ..errors import NotFoundError, VerideskError
from ..model.canonical import canonical_json, content_hash
from ..runtime import Clock, SystemClock
from ..workflow.engine import apply, initial_case, replay
from ..workflow.events import AssessmentCase, CaseEvent
from ..workflow.states import EventKind

_SCHEMA = """
CREATE TABLE IF NOT EXISTS events (
    case_id TEXT NOT NULL,
    sequence INTEGER NOT NULL,
    event_id TEXT NOT NULL UNIQUE,
    kind TEXT NOT NULL,
    document TEXT NOT NULL,
    content_hash TEXT NOT NULL,
    inserted_at TEXT NOT NULL,
    PRIMARY KEY (case_id, sequence)
);
CREATE TABLE IF NOT EXISTS snapshots (
    case_id TEXT PRIMARY KEY,
    version INTEGER NOT NULL,
    document TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS transcripts (
    case_id TEXT NOT NULL,
    sequence INTEGER NOT NULL,
    event_id TEXT NOT NULL,
    task TEXT NOT NULL,
    document TEXT NOT NULL,
    PRIMARY KEY (case_id, sequence)
);
CREATE TABLE IF NOT EXISTS idempotency (
    key TEXT NOT NULL,
    route TEXT NOT NULL,
    status INTEGER NOT NULL,
    body TEXT NOT NULL,
    PRIMARY KEY (key, route)
);
CREATE TABLE IF NOT EXISTS staged_submissions (
    case_id TEXT PRIMARY KEY,
    document TEXT NOT NULL
);
"""


class StorageError(VerideskError):
    code = "storage_error"


class ConflictError(VerideskError):
    """The case moved under the writer; retry against the fresh version."""

    code = "version_conflict"

    def __init__(self, actual_version: int):
        super().__init__(f"case version is {actual_version}, not what the writer expected")
        self.actual_version = actual_version

    def details(self) -> dict:
        return {"actual_version": self.actual_version}


class BundleIntegrityError(VerideskError):
    code = "bundle_integrity"

    def __init__(self, reason: str):
        super().__init__(f"audit bundle failed integrity check: {reason}")
        self.reason = reason

    def details(self) -> dict:
        return {"reason": self.reason}


@dataclass(frozen=True)
class EventRecord:
    event: CaseEvent
    content_hash: str
    inserted_at: str


class EventStore:
    """Store over one SQLite file (or ':memory:' for tests)."""

    def __init__(self, path: str | Path = ":memory:", clock: Clock | None = None):
        self._path = str(path)
        self._clock = clock or SystemClock()
        self._memory = self._path == ":memory:"
        self._lock = threading.RLock()
        if self._memory:
            self._shared = self._connect()
        else:
            self._shared = None
            with self._connection() as conn:
                conn.executescript(_SCHEMA)

    def _connect(self) -> sqlite3.Connection:
        # The in-memory connection is shared across threads but every use
        # holds self._lock, so sqlite's same-thread check can be lifted.
        conn = sqlite3.connect(
            self._path, timeout=30, check_same_thread=not self._memory
        )
        conn.execute("PRAGMA foreign_keys = ON")
        if not self._memory:
            conn.execute("PRAGMA journal_mode = WAL")
        conn.executescript(_SCHEMA)
        return conn

    class _Ctx:
        def __init__(self, store: "EventStore"):
            self._store = store
            self._conn: sqlite3.Connection | None = None

        def __enter__(self) -> sqlite3.Connection:
            if self._store._memory:
                self._store._lock.acquire()
                return self._store._shared
            self._conn = self._store._connect()
            return self._conn

        def __exit__(self, exc_type, exc, tb):
            target = self._store._shared if self._store._memory else self._conn
            try:
                if exc_type is None:
                    target.commit()
                else:
                    target.rollback()
            finally:
                if self._store._memory:
                    self._store._lock.release()
                else:
                    self._conn.close()
            return False

    def _connection(self) -> "_Ctx":
        return EventStore._Ctx(self)

    # -- events ----------------------------------------------------------

    def append_event(
        self, case_id: str, expected_version: int, event: CaseEvent
    ) -> EventRecord:
        """Atomically append ``event`` if the case is at ``expected_version``.

        The event is validated by replaying the case and applying it; any
        TransitionError propagates and nothing is written. A version
        mismatch (including a wrong event sequence) raises ConflictError.
        """
        if event.case_id != case_id:
            raise StorageError("event case_id does not match the append target")
        try:
            with self._connection() as conn:
                conn.execute("BEGIN IMMEDIATE")
                row = conn.execute(
                    "SELECT COALESCE(MAX(sequence), 0) FROM events WHERE case_id = ?",
                    (case_id,),
                ).fetchone()
                actual = row[0]
                if actual != expected_version or event.sequence != expected_version + 1:
                    raise ConflictError(actual_version=actual)

                if event.sequence == 1:
                    case = initial_case(event)
                else:
                    case = apply(self._replay_locked(conn, case_id), event)

                document = canonical_json(event.to_dict())
                digest = content_hash(event.to_dict())
                inserted_at = self._clock.now().isoformat()
                conn.execute(
                    "INSERT INTO events (case_id, sequence, event_id, kind, document,"
                    " content_hash, inserted_at) VALUES (?, ?, ?, ?, ?, ?, ?)",
                    (
                        case_id,
                        event.sequence,
                        event.event_id,
                        event.kind.value,
                        document,
                        digest,
                        inserted_at,
                    ),
                )
                conn.execute(
                    "INSERT INTO snapshots (case_id, version, document) VALUES (?, ?, ?)"
                    " ON CONFLICT(case_id) DO UPDATE SET version = excluded.version,"
                    " document = excluded.document",
                    (case_id, case.version, canonical_json(case.to_dict())),
                )
                return EventRecord(event=event, content_hash=digest, inserted_at=inserted_at)
        except sqlite3.IntegrityError as exc:
            raise ConflictError(actual_version=self.current_version(case_id)) from exc
        except sqlite3.Error as exc:
            raise StorageError(str(exc)) from exc

    def _replay_locked(self, conn: sqlite3.Connection, case_id: str) -> AssessmentCase:
        rows = conn.execute(
            "SELECT document FROM events WHERE case_id = ? ORDER BY sequence",
            (case_id,),
        ).fetchall()
        if not rows:
            raise NotFoundError("case", case_id)
        return replay(CaseEvent.from_dict(json.loads(r[0])) for r in rows)

    def load_events(self, case_id: str) -> list[CaseEvent]:
        with self._connection() as conn:
            rows = conn.execute(
                "SELECT document FROM events WHERE case_id = ? ORDER BY sequence",
                (case_id,),
            ).fetchall()
        if not rows:
            raise NotFoundError("case", case_id)
        return [CaseEvent.from_dict(json.loads(r[0])) for r in rows]

    def load_case(self, case_id: str) -> AssessmentCase:
        """Replay the stored events; the log is the source of truth."""
        return replay(self.load_events(case_id))

    def current_version(self, case_id: str) -> int:
        with self._connection() as conn:
            row = conn.execute(
                "SELECT COALESCE(MAX(sequence), 0) FROM events WHERE case_id = ?",
                (case_id,),
            ).fetchone()
        return row[0]

    def case_exists(self, case_id: str) -> bool:
        return self.current_version(case_id) > 0

    def list_cases(self) -> list[str]:
        with self._connection() as conn:
            rows = conn.execute(
                "SELECT DISTINCT case_id FROM events ORDER BY case_id"
            ).fetchall()
        return [r[0] for r in rows]

    def snapshot_document(self, case_id: str) -> dict:
        with self._connection() as conn:
            row = conn.execute(
                "SELECT document FROM snapshots WHERE case_id = ?", (case_id,)
            ).fetchone()
        if row is None:
            raise NotFoundError("case", case_id)
        return json.loads(row[0])

    def check_coherence(self, case_id: str) -> bool:
        """True iff the stored snapshot equals the replay of the log."""
        snapshot = self.snapshot_document(case_id)
        return canonical_json(snapshot) == canonical_json(self.load_case(case_id).to_dict())

    def event_records(self, case_id: str) -> list[dict]:
        """Stored event documents with their content hashes, in order."""
        with self._connection() as conn:
            rows = conn.execute(
                "SELECT document, content_hash FROM events WHERE case_id = ?"
                " ORDER BY sequence",
                (case_id,),
            ).fetchall()
        if not rows:
            raise NotFoundError("case", case_id)
        return [dict(json.loads(doc), content_hash=digest) for doc, digest in rows]

    # -- transcripts -------------------------------------------------------

    def save_transcripts(
        self, case_id: str, sequence: int, event_id: str, task: str, attempts: list[dict]
    ) -> None:
        with self._connection() as conn:
            conn.execute(
                "INSERT OR REPLACE INTO transcripts (case_id, sequence, event_id, task,"
                " document) VALUES (?, ?, ?, ?, ?)",
                (case_id, sequence, event_id, task, canonical_json(attempts)),
            )

    def transcripts_for_case(self, case_id: str) -> list[dict]:
        with self._connection() as conn:
            rows = conn.execute(
                "SELECT sequence, event_id, task, document FROM transcripts"
                " WHERE case_id = ? ORDER BY sequence",
                (case_id,),
            ).fetchall()
        return [
            {
                "sequence": sequence,
                "event_id": event_id,
                "task": task,
                "attempts": json.loads(document),
            }
            for sequence, event_id, task, document in rows
        ]

    # -- idempotency -------------------------------------------------------

    def idempotent_response(self, key: str, route: str) -> tuple[int, str] | None:
        with self._connection() as conn:
            row = conn.execute(
                "SELECT status, body FROM idempotency WHERE key = ? AND route = ?",
                (key, route),
            ).fetchone()
        return (row[0], row[1]) if row else None

    def remember_response(self, key: str, route: str, status: int, body: str) -> None:
        with self._connection() as conn:
            conn.execute(
                "INSERT OR IGNORE INTO idempotency (key, route, status, body)"
                " VALUES (?, ?, ?, ?)",
                (key, route, status, body),
            )

    # -- staged submissions (ingest holds these until scoring starts) ------

    def stage_submission(self, case_id: str, document: dict) -> None:
        with self._connection() as conn:
            conn.execute(
                "INSERT OR REPLACE INTO staged_submissions (case_id, document)"
                " VALUES (?, ?)",
                (case_id, canonical_json(document)),
            )

    def staged_submission(self, case_id: str) -> dict | None:
        with self._connection() as conn:
            row = conn.execute(
                "SELECT document FROM staged_submissions WHERE case_id = ?", (case_id,)
            ).fetchone()
        return json.loads(row[0]) if row else None


def iter_case_events(store: EventStore, case_id: str) -> Iterator[CaseEvent]:
    yield from store.load_events(case_id)
