"""The shared fixture corpus must stay in lockstep with the server validators.

``frontend/shared/validation-corpus.json`` records, for every fixture
document, the verdict the server validators produced when the corpus was
generated. The browser test suite asserts the client-side validators
reproduce those verdicts. This test closes the loop on the server side: if
a validator rule changes, it fails here first, signalling that the corpus
must be regenerated (``python3 frontend/scripts/generate_validation_corpus.py``)
and the client suite re-run.
"""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from veridesk.model.errors import ValidationError
from veridesk.model.validators import (
    validate_initial_scores,
    validate_question_set,
    validate_reassessment,
    validate_rubric,
)

CORPUS_PATH = Path(__file__).resolve().parent.parent / "frontend" / "shared" / "validation-corpus.json"


def load_corpus() -> dict:
    return json.loads(CORPUS_PATH.read_text())


def run_server_validator(fixture: dict):
    """Apply the server validator for the fixture's kind; return the artifact."""
    rubric = None
    initial = None
    context = fixture["context"]
    if context is not None:
        rubric = validate_rubric(context["rubric"])
        if context.get("initial") is not None:
            initial = validate_initial_scores(context["initial"], rubric)
    kind = fixture["kind"]
    document = fixture["document"]
    if kind == "rubric":
        return validate_rubric(document)
    if kind == "question_set":
        return validate_question_set(document, rubric)
    if kind == "initial_scores":
        return validate_initial_scores(document, rubric)
    if kind == "reassessment":
        return validate_reassessment(document, rubric, initial)
    raise AssertionError(f"unknown fixture kind: {kind}")


def corpus_fixtures() -> list[dict]:
    return load_corpus()["fixtures"]


def test_corpus_is_large_enough_for_the_contract():
    corpus = load_corpus()
    assert corpus["count"] == len(corpus["fixtures"])
    assert corpus["count"] >= 50
    kinds = {f["kind"] for f in corpus["fixtures"]}
    assert kinds == {"rubric", "question_set", "initial_scores", "reassessment"}
    # Both verdict classes must be represented, or the contract test proves nothing.
    verdicts = {f["verdict"] for f in corpus["fixtures"]}
    assert verdicts == {"accept", "reject"}


def test_corpus_fixture_names_are_unique():
    names = [f["name"] for f in corpus_fixtures()]
    assert len(names) == len(set(names))


@pytest.mark.parametrize("fixture", corpus_fixtures(), ids=lambda f: f["name"])
def test_recorded_verdict_matches_server_validator(fixture: dict):
    try:
        artifact = run_server_validator(fixture)
    except ValidationError as exc:
        assert fixture["verdict"] == "reject", (
            f"corpus says accept but server rejected with {sorted({v.code for v in exc.violations})}"
        )
        assert sorted({v.code for v in exc.violations}) == fixture["violation_codes"]
    else:
        assert fixture["verdict"] == "accept", (
            f"corpus says reject ({fixture['violation_codes']}) but server accepted"
        )
        assert fixture["violation_codes"] == []
        if fixture["kind"] == "initial_scores":
            assert artifact.weighted_total_tenths == fixture["expected_total_tenths"]
        elif fixture["kind"] == "reassessment":
            assert artifact.final_weighted_total_tenths == fixture["expected_total_tenths"]
        else:
            assert fixture["expected_total_tenths"] is None
