"""Canonical JSON serialization and content hashing.

All diffing, audit hashing, and equality comparisons in the system go
through this one encoding: object keys sorted, UTF-8, no insignificant
whitespace. Two values are "the same artifact" iff their canonical bytes
are equal.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any


def canonical_json(data: Any) -> str:
    """Render ``data`` (JSON-compatible) to its canonical text form."""
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def canonical_bytes(data: Any) -> bytes:
    return canonical_json(data).encode("utf-8")


def content_hash(data: Any) -> str:
    """Lowercase hex SHA-256 digest over the canonical serialization."""
    return hashlib.sha256(canonical_bytes(data)).hexdigest()


def canonical_equal(a: Any, b: Any) -> bool:
    return canonical_json(a) == canonical_json(b)
