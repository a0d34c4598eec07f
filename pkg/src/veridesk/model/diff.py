"""Structured field-path diffs over artifact documents.

Diffs are computed and applied on the plain-dict document form of an
artifact (its ``to_dict()`` output), so every entry's path reads like
``criteria[0].levels[2].desc``. Application is strict: replace and remove
carry the expected old value and fail if the document disagrees, which
catches edits computed against a stale draft.

Law: ``apply_diff(before, compute_diff(before, after))`` equals ``after``
under canonical serialization, and the diff is empty iff the documents are
canonically equal.
"""

from __future__ import annotations

import copy
import re
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

from .canonical import canonical_equal
from .errors import (
    EditPathError,
    KindMismatchError,
    MalformedFieldError,
    StaleEditError,
    single,
)

OPS = ("replace", "add", "remove")

_TOKEN = re.compile(r"([^.\[\]]+)|\[(\d+)\]")


@dataclass(frozen=True)
class DiffEntry:
    """One edit: an operation at a field path with before/after values.

    - replace: ``old`` -> ``new`` at an existing location
    - add: insert ``new`` at a not-yet-existing key or list index
    - remove: delete the value at the path, which must equal ``old``
    """

    op: str
    path: str
    old: Any = None
    new: Any = None

    def __post_init__(self):
        if self.op not in OPS:
            raise single(MalformedFieldError(path="op", expected="one of replace, add, remove"))
        if not self.path:
            raise single(MalformedFieldError(path="path", expected="nonempty field path"))

    def to_dict(self) -> dict:
        data: dict[str, Any] = {"op": self.op, "path": self.path}
        if self.op in ("replace", "remove"):
            data["old"] = self.old
        if self.op in ("replace", "add"):
            data["new"] = self.new
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "DiffEntry":
        return cls(
            op=data.get("op", ""),
            path=data.get("path", ""),
            old=data.get("old"),
            new=data.get("new"),
        )


def parse_path(path: str) -> list:
    """Split a field path into dict-key and list-index tokens.

    ``"criteria[0].weight"`` -> ``["criteria", 0, "weight"]``.
    """
    tokens: list = []
    consumed = 0
    for match in _TOKEN.finditer(path):
        gap = path[consumed : match.start()]
        key, index = match.groups()
        if index is not None:
            # "[n]" attaches directly to the token before it.
            if gap:
                raise single(EditPathError(path=path))
            tokens.append(int(index))
        else:
            # keys are dot-separated; only the first token stands bare
            if gap != ("" if not tokens else "."):
                raise single(EditPathError(path=path))
            tokens.append(key)
        consumed = match.end()
    if consumed != len(path) or not tokens:
        raise single(EditPathError(path=path))
    return tokens


def _join(prefix: str, token) -> str:
    if isinstance(token, int):
        return f"{prefix}[{token}]"
    return f"{prefix}.{token}" if prefix else token


def compute_diff(before: Any, after: Any) -> tuple[DiffEntry, ...]:
    """Minimal field-path edits turning document ``before`` into ``after``.

    List shrinkage emits removes from the tail downward so entries can be
    applied in order without index shifting.
    """
    entries: list[DiffEntry] = []
    _walk(before, after, "", entries)
    return tuple(entries)


def _walk(before: Any, after: Any, prefix: str, out: list[DiffEntry]) -> None:
    if isinstance(before, dict) and isinstance(after, dict):
        for key in sorted(set(before) | set(after)):
            path = _join(prefix, key)
            if key not in after:
                out.append(DiffEntry(op="remove", path=path, old=before[key]))
            elif key not in before:
                out.append(DiffEntry(op="add", path=path, new=after[key]))
            else:
                _walk(before[key], after[key], path, out)
        return
    if isinstance(before, list) and isinstance(after, list):
        for i in range(min(len(before), len(after))):
            _walk(before[i], after[i], _join(prefix, i), out)
        for i in range(len(before), len(after)):
            out.append(DiffEntry(op="add", path=_join(prefix, i), new=after[i]))
        for i in range(len(before) - 1, len(after) - 1, -1):
            out.append(DiffEntry(op="remove", path=_join(prefix, i), old=before[i]))
        return
    if not canonical_equal(before, after):
        out.append(DiffEntry(op="replace", path=prefix or ".", old=before, new=after))


def apply_diff(document: dict, entries: Iterable[DiffEntry]) -> dict:
    """Apply edits to a copy of ``document`` and return the edited copy.

    Entries are applied in order. Path resolution failures raise
    EditPathError; old-value mismatches raise StaleEditError. The input
    document is never mutated.
    """
    doc = copy.deepcopy(document)
    for entry in entries:
        _apply_one(doc, entry)
    return doc


def _apply_one(doc: dict, entry: DiffEntry) -> None:
    tokens = parse_path(entry.path)
    parent: Any = doc
    for token in tokens[:-1]:
        parent = _step(parent, token, entry.path)
    last = tokens[-1]

    if entry.op == "add":
        if isinstance(parent, dict):
            if not isinstance(last, str):
                raise single(EditPathError(path=entry.path))
            if last in parent:
                raise single(StaleEditError(path=entry.path))
            parent[last] = copy.deepcopy(entry.new)
        elif isinstance(parent, list):
            if not isinstance(last, int) or not 0 <= last <= len(parent):
                raise single(EditPathError(path=entry.path))
            parent.insert(last, copy.deepcopy(entry.new))
        else:
            raise single(EditPathError(path=entry.path))
        return

    current = _step(parent, last, entry.path)
    if not canonical_equal(current, entry.old):
        raise single(StaleEditError(path=entry.path))
    if entry.op == "replace":
        parent[last] = copy.deepcopy(entry.new)
    else:
        del parent[last]


def _step(container: Any, token, path: str) -> Any:
    if isinstance(container, dict) and isinstance(token, str) and token in container:
        return container[token]
    if isinstance(container, list) and isinstance(token, int) and 0 <= token < len(container):
        return container[token]
    raise single(EditPathError(path=path))


def diff_artifacts(before: Any, after: Any) -> tuple[DiffEntry, ...]:
    """Diff two artifacts of the same kind via their document forms."""
    from .types import ARTIFACT_TYPES

    def kind_of(value: Any) -> str:
        for kind, cls in ARTIFACT_TYPES.items():
            if isinstance(value, cls):
                return kind
        return type(value).__name__

    left, right = kind_of(before), kind_of(after)
    if left != right or left not in ARTIFACT_TYPES:
        raise KindMismatchError(left, right)
    return compute_diff(before.to_dict(), after.to_dict())


def diff_documents(before: dict, after: dict) -> tuple[DiffEntry, ...]:
    """Diff two plain documents of the same (unchecked) shape."""
    return compute_diff(before, after)


def entries_from_payload(raw: Sequence[dict]) -> tuple[DiffEntry, ...]:
    """Parse a client-supplied edits array into DiffEntry values."""
    if not isinstance(raw, (list, tuple)):
        raise single(MalformedFieldError(path="edits", expected="array of diff entries"))
    parsed = []
    for i, item in enumerate(raw):
        if not isinstance(item, dict):
            raise single(MalformedFieldError(path=f"edits[{i}]", expected="diff entry object"))
        parsed.append(DiffEntry.from_dict(item))
    return tuple(parsed)
