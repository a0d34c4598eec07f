"""Long-running generation jobs exposed as pollable operations.

Generation calls a language-model provider and may take a while, so the
HTTP layer accepts the request, runs the work through this registry, and
returns an operation id the client can poll.  Two run modes:

* ``inline`` — the work runs synchronously before the registry call
  returns.  Used in deterministic setups and tests so that a 202 response
  means the operation has already settled.
* ``thread`` — the work runs on a daemon thread and callers poll.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable

from ..errors import NotFoundError, envelope

RUN_MODES = ("inline", "thread")


@dataclass
class Operation:
    operation_id: str
    case_id: str
    task: str
    status: str = "running"  # running | succeeded | failed
    result: dict | None = None
    error: dict | None = None

    def to_dict(self) -> dict:
        doc: dict = {
            "operation_id": self.operation_id,
            "case_id": self.case_id,
            "task": self.task,
            "status": self.status,
        }
        if self.result is not None:
            doc["result"] = self.result
        if self.error is not None:
            doc["error"] = self.error
        return doc


class OperationRegistry:
    """Tracks operations in memory and runs their work functions."""

    def __init__(self, mode: str = "inline") -> None:
        if mode not in RUN_MODES:
            raise ValueError(f"unknown operations mode: {mode!r}")
        self.mode = mode
        self._lock = threading.Lock()
        self._operations: dict[str, Operation] = {}

    def start(
        self,
        operation_id: str,
        case_id: str,
        task: str,
        fn: Callable[[], dict],
    ) -> Operation:
        """Register an operation and run ``fn`` per the configured mode.

        ``fn`` returns the operation result document on success; any
        exception marks the operation failed with the error envelope.
        """
        operation = Operation(operation_id=operation_id, case_id=case_id, task=task)
        with self._lock:
            if operation_id in self._operations:
                raise ValueError(f"duplicate operation id: {operation_id!r}")
            self._operations[operation_id] = operation
        if self.mode == "inline":
            self._run(operation, fn)
        else:
            worker = threading.Thread(
                target=self._run, args=(operation, fn), daemon=True
            )
            worker.start()
        return operation

    def _run(self, operation: Operation, fn: Callable[[], dict]) -> None:
        try:
            result = fn()
        except Exception as exc:  # noqa: BLE001 - reported to the poller
            with self._lock:
                operation.status = "failed"
                operation.error = envelope(exc)
        else:
            with self._lock:
                operation.status = "succeeded"
                operation.result = result

    def get(self, operation_id: str) -> Operation:
        with self._lock:
            operation = self._operations.get(operation_id)
        if operation is None:
            raise NotFoundError("operation", operation_id)
        return operation
