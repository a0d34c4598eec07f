"""Audit bundle export and tamper-checked import.

A bundle is one self-contained JSON document: the full event log (each
event stamped with its content hash), every generation transcript, and
the materialized case with its own hash, all sealed under a bundle hash.
Hashes are SHA-256 over canonical serialization, lowercase hex. The
bundle deliberately carries no export timestamp and no storage metadata,
so two exports of identical histories are byte-identical.
"""

from __future__ import annotations

import json
from typing import Any, Mapping

from ..model.canonical import canonical_bytes, canonical_json, content_hash
from ..model.types import SCHEMA_VERSION
from ..workflow.engine import replay
from ..workflow.events import CaseEvent
from .store import BundleIntegrityError, EventStore

BUNDLE_KIND = "audit_bundle"


def export_bundle(store: EventStore, case_id: str) -> dict:
    """Assemble the audit bundle for one case."""
    events = store.event_records(case_id)
    case = store.load_case(case_id)
    case_document = case.to_dict()
    body = {
        "schema_version": SCHEMA_VERSION,
        "kind": BUNDLE_KIND,
        "case_id": case_id,
        "events": events,
        "transcripts": store.transcripts_for_case(case_id),
        "case": case_document,
        "case_hash": content_hash(case_document),
    }
    body["bundle_hash"] = content_hash(body)
    return body


def bundle_bytes(bundle: Mapping[str, Any]) -> bytes:
    return canonical_bytes(bundle)


def verify_bundle(bundle: Mapping[str, Any]) -> list[CaseEvent]:
    """Check every hash and the replay identity; return the parsed events."""
    if not isinstance(bundle, Mapping) or bundle.get("kind") != BUNDLE_KIND:
        raise BundleIntegrityError("not an audit bundle document")
    if bundle.get("schema_version") != SCHEMA_VERSION:
        raise BundleIntegrityError(
            f"unsupported bundle schema_version {bundle.get('schema_version')!r}"
        )

    body = {k: v for k, v in bundle.items() if k != "bundle_hash"}
    if content_hash(body) != bundle.get("bundle_hash"):
        raise BundleIntegrityError("bundle hash mismatch")

    events: list[CaseEvent] = []
    for row in bundle["events"]:
        document = {k: v for k, v in row.items() if k != "content_hash"}
        if content_hash(document) != row.get("content_hash"):
            raise BundleIntegrityError(
                f"event {row.get('sequence')} content hash mismatch"
            )
        try:
            events.append(CaseEvent.from_dict(document))
        except Exception as exc:
            raise BundleIntegrityError(
                f"event {row.get('sequence')} does not parse: {exc}"
            ) from exc

    case_document = bundle["case"]
    if content_hash(case_document) != bundle.get("case_hash"):
        raise BundleIntegrityError("case hash mismatch")
    try:
        replayed = replay(events)
    except Exception as exc:
        raise BundleIntegrityError(f"event log does not replay: {exc}") from exc
    if canonical_json(replayed.to_dict()) != canonical_json(case_document):
        raise BundleIntegrityError("materialized case does not equal the event replay")
    if replayed.case_id != bundle.get("case_id"):
        raise BundleIntegrityError("bundle case_id does not match its events")
    return events


def import_bundle(store: EventStore, bundle: Mapping[str, Any]) -> str:
    """Verify and load a bundle into ``store``; the case must be new there."""
    events = verify_bundle(bundle)
    case_id = bundle["case_id"]
    for i, event in enumerate(events):
        store.append_event(case_id, i, event)
    for row in bundle.get("transcripts", []):
        store.save_transcripts(
            case_id, row["sequence"], row["event_id"], row["task"], row["attempts"]
        )
    return case_id


def load_bundle(data: bytes | str) -> dict:
    try:
        parsed = json.loads(data)
    except json.JSONDecodeError as exc:
        raise BundleIntegrityError(f"bundle is not valid JSON: {exc}") from exc
    if not isinstance(parsed, dict):
        raise BundleIntegrityError("bundle must be a JSON object")
    return parsed
