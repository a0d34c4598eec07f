"""Injectable time and identifier sources.

Every timestamp and identifier in the system flows through these two
interfaces so that deterministic mode can make two independent runs
byte-identical, which is what the audit-bundle parity guarantees rest on.

Determinism must survive process boundaries: a pipeline split across
several CLI invocations has to produce the same bytes as the same pipeline
run in one server process. Counter-based ids cannot deliver that for
per-event identifiers (each process would restart the count), so event ids
are derived from ``(case_id, sequence)`` and per-case artifact ids from
``(case_id, kind)`` — values that are identical wherever the event is
produced. The deterministic clock is frozen at one instant for the same
reason.
"""

from __future__ import annotations

import itertools
import threading
import uuid
from datetime import datetime, timedelta, timezone
from typing import Protocol

EPOCH = datetime(2026, 1, 1, tzinfo=timezone.utc)


class Clock(Protocol):
    def now(self) -> datetime: ...


class SystemClock:
    def now(self) -> datetime:
        return datetime.now(timezone.utc)


class FixedClock:
    """Starts at a fixed instant and advances a fixed step per reading.

    A step of 0 freezes the clock, which is what deterministic mode uses:
    call counts then cannot influence recorded timestamps.
    """

    def __init__(self, start: datetime = EPOCH, step_seconds: int = 0):
        if start.tzinfo is None:
            raise ValueError("FixedClock start must be timezone-aware")
        self._next = start.astimezone(timezone.utc)
        self._step = timedelta(seconds=step_seconds)
        self._lock = threading.Lock()

    def now(self) -> datetime:
        with self._lock:
            current = self._next
            self._next = current + self._step
            return current


class IdSource(Protocol):
    def next_id(self, prefix: str) -> str: ...

    def event_id(self, case_id: str, sequence: int) -> str: ...

    def scoped_id(self, case_id: str, kind: str) -> str: ...


class RandomIdSource:
    def next_id(self, prefix: str) -> str:
        return f"{prefix}-{uuid.uuid4().hex[:12]}"

    def event_id(self, case_id: str, sequence: int) -> str:
        return self.next_id("ev")

    def scoped_id(self, case_id: str, kind: str) -> str:
        return self.next_id(kind)


class CounterIdSource:
    """Deterministic ids.

    Top-level ids count per prefix (case-0001, case-0002, ...); event and
    per-case artifact ids are derived from the case so they do not depend
    on how work is split across processes.
    """

    def __init__(self):
        self._counters: dict[str, itertools.count] = {}
        self._lock = threading.Lock()

    def next_id(self, prefix: str) -> str:
        with self._lock:
            counter = self._counters.setdefault(prefix, itertools.count(1))
            return f"{prefix}-{next(counter):04d}"

    def event_id(self, case_id: str, sequence: int) -> str:
        return f"{case_id}-e{sequence:04d}"

    def scoped_id(self, case_id: str, kind: str) -> str:
        return f"{case_id}-{kind}"
