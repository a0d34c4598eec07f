"""Generate the shared validator-agreement corpus.

Builds a few hundred artifact documents — valid ones and systematic
mutations across every rule the validators enforce — runs the server-side
validators over them, and writes the documents together with the server's
verdicts to ``frontend/shared/validation-corpus.json``.

Both test suites read that file: the Python suite asserts the recorded
verdicts still match the server validators (so validator changes force a
regeneration), and the TypeScript suite asserts the client validators
reproduce every verdict and violation-code set. Run from anywhere:

    python3 frontend/scripts/generate_validation_corpus.py

The output is deterministic for a given seed, so regenerating without a
behavior change produces a byte-identical file.
"""

from __future__ import annotations

import copy
import json
import random
from pathlib import Path

from veridesk.model.errors import ValidationError
from veridesk.model.validators import (
    validate_initial_scores,
    validate_question_set,
    validate_reassessment,
    validate_rubric,
)

SEED = 20260815
OUT_PATH = Path(__file__).resolve().parent.parent / "shared" / "validation-corpus.json"

LEVEL_TEXTS = {
    1: "Work at this level shows no engagement with the criterion.",
    2: "Work at this level gestures at the criterion without control.",
    3: "Work at this level meets the criterion in most places.",
    4: "Work at this level meets the criterion consistently.",
    5: "Work at this level exceeds the criterion with evident command.",
}

NAME_POOL = [
    "Claim",
    "Evidence Use",
    "Reasoning & Analysis",
    "Organization",
    "Style",
    "Mechanics",
    "Sources",
    "Counterargument",
]


def full_levels() -> list[dict]:
    return [{"level": o, "desc": LEVEL_TEXTS[o]} for o in (1, 2, 3, 4, 5)]


def criterion(name: str, weight) -> dict:
    return {
        "criterion_name": name,
        "weight": weight,
        "description": f"How well the work handles {name.lower()}.",
        "levels": full_levels(),
    }


def rubric_doc(pairs: list[tuple[str, int]]) -> dict:
    return {"criteria": [criterion(name, weight) for name, weight in pairs]}


def split_weights(rng: random.Random, count: int) -> list[int]:
    """Random positive integer weights summing to exactly 100."""
    cuts = sorted(rng.sample(range(1, 100), count - 1)) if count > 1 else []
    bounds = [0, *cuts, 100]
    return [bounds[i + 1] - bounds[i] for i in range(count)]


# Fixed context artifacts for the rubric-dependent validators.
CONTEXT_RUBRIC = rubric_doc([("Claim", 25), ("Evidence Use", 20), ("Reasoning & Analysis", 55)])
CONTEXT_INITIAL = [
    {"criterion_name": "Claim", "score": 3, "justification": "The thesis is stated but drifts."},
    {"criterion_name": "Evidence Use", "score": 3, "justification": "Quotes appear without linkage."},
    {"criterion_name": "Reasoning & Analysis", "score": 4, "justification": "Inferences mostly follow."},
]


def score_rows(overrides: dict | None = None, **kwargs) -> list[dict]:
    rows = copy.deepcopy(CONTEXT_INITIAL)
    for row in rows:
        row.update(kwargs)
    if overrides:
        for name, fields in overrides.items():
            for row in rows:
                if row["criterion_name"] == name:
                    row.update(fields)
    return rows


def reassessment_doc(finals: dict[str, int], feedback: str = "Revise the linkage between evidence and claims.") -> dict:
    entries = []
    for row in CONTEXT_INITIAL:
        name = row["criterion_name"]
        final = finals.get(name, row["score"])
        entries.append(
            {
                "criterion_name": name,
                "initial_score": row["score"],
                "final_score": final,
                "delta": final - row["score"],
                "rationale": f"The responses clarified the handling of {name.lower()}.",
            }
        )
    return {"entries": entries, "final_feedback": feedback}


def question(qid, kind: str, text: str, target=None) -> dict:
    doc: dict = {"kind": kind, "text": text}
    if qid is not None:
        doc["question_id"] = qid
    if target is not None:
        doc["target_criterion"] = target
    return doc


EVAL_TEXT = "Which piece of evidence does the least work for your argument, and why?"
AUTH_TEXT = "Walk through how you drafted the second paragraph."


def build_fixtures() -> list[dict]:
    rng = random.Random(SEED)
    fixtures: list[dict] = []

    def add(name: str, kind: str, document, context: dict | None = None) -> None:
        fixtures.append({"name": name, "kind": kind, "document": document, "context": context})

    # -- rubrics: valid shapes -------------------------------------------------
    add("rubric-single-criterion", "rubric", rubric_doc([("Claim", 100)]))
    add("rubric-context-shape", "rubric", copy.deepcopy(CONTEXT_RUBRIC))
    add(
        "rubric-explicit-schema-version",
        "rubric",
        {"schema_version": "1", **rubric_doc([("Claim", 40), ("Style", 60)])},
    )
    add(
        "rubric-names-with-whitespace",
        "rubric",
        rubric_doc([("  Claim  ", 50), ("Evidence Use", 50)]),
    )
    for i in range(12):
        count = rng.randint(1, 6)
        names = rng.sample(NAME_POOL, count)
        add(f"rubric-random-valid-{i:02d}", "rubric", rubric_doc(list(zip(names, split_weights(rng, count)))))

    # -- rubrics: weight-sum mutants -------------------------------------------
    for i in range(8):
        count = rng.randint(2, 6)
        names = rng.sample(NAME_POOL, count)
        doc = rubric_doc(list(zip(names, split_weights(rng, count))))
        index = rng.randrange(count)
        delta = rng.choice([1, 3, 5, 7, -1, -3])
        if doc["criteria"][index]["weight"] + delta < 1:
            delta = abs(delta)
        doc["criteria"][index]["weight"] += delta
        add(f"rubric-weight-perturbed-{i:02d}", "rubric", doc)
    add("rubric-weight-sum-105", "rubric", rubric_doc([("Claim", 55), ("Style", 50)]))
    add("rubric-weight-sum-95", "rubric", rubric_doc([("Claim", 45), ("Style", 50)]))
    add(
        "rubric-pilot-subset-sums-60",
        "rubric",
        rubric_doc([("Claim", 30), ("Evidence Use", 20), ("Reasoning & Analysis", 10)]),
    )

    # -- rubrics: weight shape mutants ------------------------------------------
    for label, bad in [
        ("zero", 0),
        ("negative", -10),
        ("fractional", 33.5),
        ("string", "30"),
        ("boolean", True),
        ("null", None),
    ]:
        doc = rubric_doc([("Claim", 50), ("Style", 50)])
        doc["criteria"][0]["weight"] = bad
        add(f"rubric-weight-{label}", "rubric", doc)
    doc = rubric_doc([("Claim", 50), ("Style", 50)])
    del doc["criteria"][0]["weight"]
    add("rubric-weight-missing", "rubric", doc)

    # -- rubrics: level mutants ---------------------------------------------------
    for ordinal in (1, 3, 5):
        doc = rubric_doc([("Claim", 100)])
        doc["criteria"][0]["levels"] = [l for l in full_levels() if l["level"] != ordinal]
        add(f"rubric-level-{ordinal}-missing", "rubric", doc)
    doc = rubric_doc([("Claim", 100)])
    doc["criteria"][0]["levels"].append({"level": 3, "desc": LEVEL_TEXTS[3]})
    add("rubric-level-duplicated", "rubric", doc)
    doc = rubric_doc([("Claim", 100)])
    doc["criteria"][0]["levels"].append({"level": 6, "desc": "Beyond the scale."})
    add("rubric-level-out-of-range", "rubric", doc)
    doc = rubric_doc([("Claim", 100)])
    doc["criteria"][0]["levels"][2] = {"level": 6, "desc": "Swapped ordinal."}
    add("rubric-level-3-replaced-by-6", "rubric", doc)
    doc = rubric_doc([("Claim", 100)])
    doc["criteria"][0]["levels"][1]["desc"] = "   "
    add("rubric-level-desc-blank", "rubric", doc)
    doc = rubric_doc([("Claim", 100)])
    doc["criteria"][0]["levels"][4]["level"] = "5"
    add("rubric-level-ordinal-string", "rubric", doc)
    doc = rubric_doc([("Claim", 100)])
    doc["criteria"][0]["levels"][0] = "not a level"
    add("rubric-level-row-not-object", "rubric", doc)
    doc = rubric_doc([("Claim", 100)])
    doc["criteria"][0]["levels"] = "high medium low"
    add("rubric-levels-not-array", "rubric", doc)

    # -- rubrics: naming and structure mutants ------------------------------------
    doc = rubric_doc([("Claim", 50), ("Style", 50)])
    doc["criteria"][0]["criterion_name"] = ""
    add("rubric-name-empty", "rubric", doc)
    add(
        "rubric-name-duplicate-case-insensitive",
        "rubric",
        rubric_doc([("Claim", 50), ("CLAIM", 50)]),
    )
    add(
        "rubric-name-duplicate-whitespace",
        "rubric",
        rubric_doc([("Evidence Use", 50), (" evidence use ", 50)]),
    )
    doc = rubric_doc([("Claim", 50), ("Style", 50)])
    doc["criteria"][1]["description"] = ""
    add("rubric-description-empty", "rubric", doc)
    add("rubric-criteria-empty", "rubric", {"criteria": []})
    add("rubric-criteria-not-array", "rubric", {"criteria": "Claim, Style"})
    add("rubric-criteria-missing", "rubric", {"title": "no criteria key"})
    doc = rubric_doc([("Claim", 50), ("Style", 50)])
    doc["criteria"][1] = 42
    add("rubric-criterion-row-not-object", "rubric", doc)
    add("rubric-document-number", "rubric", 7)
    add("rubric-document-string", "rubric", "not a rubric")
    add("rubric-document-array", "rubric", [criterion("Claim", 100)])
    add("rubric-document-null", "rubric", None)
    doc = rubric_doc([("Claim", 100)])
    doc["schema_version"] = "2"
    add("rubric-schema-version-wrong", "rubric", doc)
    doc = rubric_doc([("Claim", 40), ("claim", 0), ("Style", 60)])
    doc["criteria"][2]["levels"] = [l for l in full_levels() if l["level"] != 2]
    add("rubric-multi-violation", "rubric", doc)

    # -- question sets -----------------------------------------------------------
    ctx = {"rubric": copy.deepcopy(CONTEXT_RUBRIC)}
    add(
        "questions-single-evaluative",
        "question_set",
        {"questions": [question("q1", "evaluative", EVAL_TEXT, "Evidence Use")]},
        ctx,
    )
    add(
        "questions-bare-array-mixed",
        "question_set",
        [
            question("q1", "evaluative", EVAL_TEXT, "Claim"),
            question("q2", "authenticity", AUTH_TEXT),
        ],
        ctx,
    )
    add(
        "questions-three-at-cap",
        "question_set",
        {
            "questions": [
                question("q1", "evaluative", EVAL_TEXT, "Claim"),
                question("q2", "evaluative", EVAL_TEXT, "Evidence Use"),
                question("q3", "authenticity", AUTH_TEXT),
            ]
        },
        ctx,
    )
    add(
        "questions-authenticity-with-target",
        "question_set",
        {"questions": [question("q1", "authenticity", AUTH_TEXT, "Claim")]},
        ctx,
    )
    add(
        "questions-missing-ids-autoassigned",
        "question_set",
        {"questions": [question(None, "evaluative", EVAL_TEXT, "Claim"), question(None, "authenticity", AUTH_TEXT)]},
        ctx,
    )
    add(
        "questions-target-trimmed-match",
        "question_set",
        {"questions": [question("q1", "evaluative", EVAL_TEXT, "  Evidence Use  ")]},
        ctx,
    )
    add(
        "questions-four-over-cap",
        "question_set",
        {
            "questions": [
                question("q1", "evaluative", EVAL_TEXT, "Claim"),
                question("q2", "evaluative", EVAL_TEXT, "Evidence Use"),
                question("q3", "authenticity", AUTH_TEXT),
                question("q4", "authenticity", AUTH_TEXT),
            ]
        },
        ctx,
    )
    add("questions-empty", "question_set", {"questions": []}, ctx)
    add("questions-field-missing", "question_set", {"items": []}, ctx)
    add("questions-not-array", "question_set", {"questions": "ask about sources"}, ctx)
    add(
        "questions-duplicate-ids",
        "question_set",
        {"questions": [question("q1", "evaluative", EVAL_TEXT, "Claim"), question("q1", "authenticity", AUTH_TEXT)]},
        ctx,
    )
    add(
        "questions-autoassign-collides",
        "question_set",
        {"questions": [question("q2", "evaluative", EVAL_TEXT, "Claim"), question(None, "authenticity", AUTH_TEXT)]},
        ctx,
    )
    add(
        "questions-blank-id",
        "question_set",
        {"questions": [question("   ", "evaluative", EVAL_TEXT, "Claim")]},
        ctx,
    )
    add(
        "questions-unknown-kind",
        "question_set",
        {"questions": [question("q1", "probing", EVAL_TEXT, "Claim")]},
        ctx,
    )
    add(
        "questions-kind-missing",
        "question_set",
        {"questions": [{"question_id": "q1", "text": EVAL_TEXT, "target_criterion": "Claim"}]},
        ctx,
    )
    add(
        "questions-empty-text",
        "question_set",
        {"questions": [question("q1", "evaluative", "", "Claim")]},
        ctx,
    )
    add(
        "questions-evaluative-without-target",
        "question_set",
        {"questions": [question("q1", "evaluative", EVAL_TEXT)]},
        ctx,
    )
    add(
        "questions-evaluative-blank-target",
        "question_set",
        {"questions": [question("q1", "evaluative", EVAL_TEXT, "   ")]},
        ctx,
    )
    add(
        "questions-unknown-target",
        "question_set",
        {"questions": [question("q1", "evaluative", EVAL_TEXT, "Grammar")]},
        ctx,
    )
    add(
        "questions-target-not-string",
        "question_set",
        {"questions": [question("q1", "evaluative", EVAL_TEXT, 2)]},
        ctx,
    )
    add(
        "questions-row-not-object",
        "question_set",
        {"questions": ["ask about evidence"]},
        ctx,
    )

    # -- initial scores ------------------------------------------------------------
    add("scores-exact", "initial_scores", {"scores": score_rows()}, ctx)
    add("scores-bare-array", "initial_scores", score_rows(), ctx)
    add(
        "scores-names-whitespace",
        "initial_scores",
        {"scores": [{**row, "criterion_name": f"  {row['criterion_name']}  "} for row in score_rows()]},
        ctx,
    )
    add("scores-shuffled-order", "initial_scores", {"scores": list(reversed(score_rows()))}, ctx)
    add(
        "scores-at-bounds",
        "initial_scores",
        {"scores": score_rows({"Claim": {"score": 1}, "Evidence Use": {"score": 5}})},
        ctx,
    )
    for label, bad in [
        ("zero", 0),
        ("six", 6),
        ("fractional", 3.5),
        ("string", "3"),
        ("boolean", True),
        ("null", None),
    ]:
        add(
            f"scores-score-{label}",
            "initial_scores",
            {"scores": score_rows({"Claim": {"score": bad}})},
            ctx,
        )
    rows = score_rows()
    del rows[1]["score"]
    add("scores-score-missing", "initial_scores", {"scores": rows}, ctx)
    add(
        "scores-justification-blank",
        "initial_scores",
        {"scores": score_rows({"Evidence Use": {"justification": "  "}})},
        ctx,
    )
    add(
        "scores-name-empty",
        "initial_scores",
        {"scores": score_rows({"Claim": {"criterion_name": ""}})},
        ctx,
    )
    add("scores-criterion-missing", "initial_scores", {"scores": score_rows()[:2]}, ctx)
    add(
        "scores-criterion-extra",
        "initial_scores",
        {"scores": [*score_rows(), {"criterion_name": "Style", "score": 4, "justification": "Reads cleanly."}]},
        ctx,
    )
    add(
        "scores-criterion-duplicated",
        "initial_scores",
        {"scores": [score_rows()[0], *score_rows()]},
        ctx,
    )
    add("scores-row-not-object", "initial_scores", {"scores": ["three"]}, ctx)
    add("scores-not-array", "initial_scores", {"scores": "3, 3, 4"}, ctx)
    doc = {"schema_version": "0", "scores": score_rows()}
    add("scores-schema-version-wrong", "initial_scores", doc, ctx)

    # -- reassessments ----------------------------------------------------------
    ctx_with_initial = {"rubric": copy.deepcopy(CONTEXT_RUBRIC), "initial": score_rows()}
    add(
        "reassessment-movement",
        "reassessment",
        reassessment_doc({"Evidence Use": 4, "Reasoning & Analysis": 5}),
        ctx_with_initial,
    )
    add("reassessment-no-movement", "reassessment", reassessment_doc({}), ctx_with_initial)
    add(
        "reassessment-without-initial-context",
        "reassessment",
        reassessment_doc({"Claim": 4}),
        ctx,
    )
    add(
        "reassessment-score-drop",
        "reassessment",
        reassessment_doc({"Reasoning & Analysis": 3}),
        ctx_with_initial,
    )
    doc = reassessment_doc({"Evidence Use": 4})
    doc["entries"][1]["delta"] = 2
    add("reassessment-delta-wrong", "reassessment", doc, ctx_with_initial)
    doc = reassessment_doc({"Evidence Use": 4})
    del doc["entries"][1]["delta"]
    add("reassessment-delta-missing", "reassessment", doc, ctx_with_initial)
    doc = reassessment_doc({})
    doc["entries"][0]["final_score"] = 6
    doc["entries"][0]["delta"] = 3
    add("reassessment-final-score-six", "reassessment", doc, ctx_with_initial)
    doc = reassessment_doc({})
    doc["entries"][0]["initial_score"] = 0
    doc["entries"][0]["delta"] = 3
    add("reassessment-initial-score-zero", "reassessment", doc, ctx_with_initial)
    doc = reassessment_doc({})
    doc["entries"][2]["initial_score"] = 2
    doc["entries"][2]["delta"] = doc["entries"][2]["final_score"] - 2
    add("reassessment-initial-echo-mismatch", "reassessment", doc, ctx_with_initial)
    doc = reassessment_doc({"Claim": 4})
    doc["entries"][0]["rationale"] = ""
    add("reassessment-rationale-blank", "reassessment", doc, ctx_with_initial)
    add(
        "reassessment-feedback-blank",
        "reassessment",
        reassessment_doc({}, feedback="   "),
        ctx_with_initial,
    )
    doc = reassessment_doc({})
    del doc["final_feedback"]
    add("reassessment-feedback-missing", "reassessment", doc, ctx_with_initial)
    doc = reassessment_doc({})
    del doc["entries"][0]
    add("reassessment-entry-missing", "reassessment", doc, ctx_with_initial)
    doc = reassessment_doc({})
    doc["entries"].append(
        {"criterion_name": "Style", "initial_score": 3, "final_score": 3, "delta": 0, "rationale": "Extra row."}
    )
    add("reassessment-entry-extra", "reassessment", doc, ctx_with_initial)
    doc = reassessment_doc({})
    doc["entries"][1] = "improved"
    add("reassessment-entry-not-object", "reassessment", doc, ctx_with_initial)
    add("reassessment-entries-not-array", "reassessment", {"entries": "all better", "final_feedback": "x"}, ctx_with_initial)
    add("reassessment-document-array", "reassessment", [1, 2, 3], ctx_with_initial)
    doc = reassessment_doc({})
    doc["schema_version"] = 2
    add("reassessment-schema-version-wrong", "reassessment", doc, ctx_with_initial)

    return fixtures


def stamp_verdicts(fixtures: list[dict]) -> None:
    """Run the server validators and record verdict + violation codes."""
    for fixture in fixtures:
        context = fixture["context"]
        rubric = None
        initial = None
        if context is not None:
            rubric = validate_rubric(context["rubric"])
            if context.get("initial") is not None:
                initial = validate_initial_scores(context["initial"], rubric)
        kind = fixture["kind"]
        document = fixture["document"]
        total = None
        try:
            if kind == "rubric":
                validate_rubric(document)
            elif kind == "question_set":
                validate_question_set(document, rubric)
            elif kind == "initial_scores":
                total = validate_initial_scores(document, rubric).weighted_total_tenths
            elif kind == "reassessment":
                total = validate_reassessment(document, rubric, initial).final_weighted_total_tenths
            else:
                raise ValueError(f"unknown fixture kind: {kind}")
        except ValidationError as exc:
            fixture["verdict"] = "reject"
            fixture["violation_codes"] = sorted({v.code for v in exc.violations})
            fixture["expected_total_tenths"] = None
        else:
            fixture["verdict"] = "accept"
            fixture["violation_codes"] = []
            fixture["expected_total_tenths"] = total


def main() -> None:
    fixtures = build_fixtures()
    names = [f["name"] for f in fixtures]
    if len(names) != len(set(names)):
        raise SystemExit("duplicate fixture names")
    stamp_verdicts(fixtures)
    accepted = sum(1 for f in fixtures if f["verdict"] == "accept")
    document = {
        "generator": "frontend/scripts/generate_validation_corpus.py",
        "seed": SEED,
        "count": len(fixtures),
        "fixtures": fixtures,
    }
    OUT_PATH.parent.mkdir(parents=True, exist_ok=True)
    OUT_PATH.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n")
    print(f"wrote {len(fixtures)} fixtures ({accepted} accept / {len(fixtures) - accepted} reject) to {OUT_PATH}")


if __name__ == "__main__":
    main()
