"""Generate the shared edit-diff corpus.

Pairs of before/after documents with the edits the server's diff
implementation computes between them, written to
``frontend/shared/diff-corpus.json``. The browser suite asserts its own
diff routine reproduces every recorded entry list; the server suite
asserts the entries still match and still apply (``apply_diff(before,
entries) == after``). Together they guarantee an edit list built in the
browser is exactly what the approve endpoints expect. Regenerate with:

    python3 frontend/scripts/generate_diff_corpus.py
"""

from __future__ import annotations

import json
from pathlib import Path

from veridesk.model.diff import compute_diff

OUT_PATH = Path(__file__).resolve().parent.parent / "shared" / "diff-corpus.json"


def rubric() -> dict:
    return {
        "criteria": [
            {
                "criterion_name": "Claim",
                "weight": 40,
                "description": "How well the work states and sustains a claim.",
                "levels": [
                    {"level": 1, "desc": "No claim."},
                    {"level": 2, "desc": "A vague claim."},
                    {"level": 3, "desc": "A workable claim."},
                    {"level": 4, "desc": "A precise claim."},
                    {"level": 5, "desc": "A precise, contestable claim."},
                ],
            },
            {
                "criterion_name": "Evidence Use",
                "weight": 60,
                "description": "How well sources support the claim.",
                "levels": [
                    {"level": 1, "desc": "No sources."},
                    {"level": 2, "desc": "Sources without linkage."},
                    {"level": 3, "desc": "Sources mostly linked."},
                    {"level": 4, "desc": "Sources consistently linked."},
                    {"level": 5, "desc": "Sources marshalled."},
                ],
            },
        ],
    }


def questions() -> dict:
    return {
        "questions": [
            {
                "question_id": "q1",
                "kind": "evaluative",
                "text": "Which source does the least work here?",
                "target_criterion": "Evidence Use",
            },
            {
                "question_id": "q2",
                "kind": "authenticity",
                "text": "Walk through how you drafted paragraph two.",
                "target_criterion": None,
            },
            {
                "question_id": "q3",
                "kind": "evaluative",
                "text": "Where does the claim shift, and why?",
                "target_criterion": "Claim",
            },
        ],
    }


def build_cases() -> list[dict]:
    cases: list[dict] = []

    def case(name: str, before, after) -> None:
        cases.append({"name": name, "before": before, "after": after})

    case("identical-documents", rubric(), rubric())

    after = rubric()
    after["criteria"][0]["weight"] = 45
    after["criteria"][1]["weight"] = 55
    case("two-weight-replace", rubric(), after)

    after = rubric()
    after["criteria"][1]["levels"][2]["desc"] = "Sources mostly linked, with one gap."
    case("nested-level-descriptor-replace", rubric(), after)

    after = rubric()
    after["criteria"][0]["criterion_name"] = "Thesis"
    after["criteria"][0]["description"] = "How well the work states and sustains a thesis."
    case("criterion-rename", rubric(), after)

    after = rubric()
    after["notes"] = "tightened after the pilot"
    case("dict-key-add", rubric(), after)

    before = rubric()
    before["notes"] = "tightened after the pilot"
    case("dict-key-remove", before, rubric())

    after = questions()
    del after["questions"][2]
    del after["questions"][1]
    case("list-shrink-removes-tail-first", questions(), after)

    before = questions()
    del before["questions"][2]
    case("list-grow-adds-at-tail", before, questions())

    after = questions()
    after["questions"][1]["text"] = "Describe your revision process for paragraph two."
    after["questions"][1]["kind"] = "evaluative"
    after["questions"][1]["target_criterion"] = "Claim"
    case("list-element-field-replaces", questions(), after)

    after = questions()
    after["questions"][0]["target_criterion"] = None
    case("replace-with-null", questions(), after)

    before = questions()
    before["questions"][0]["target_criterion"] = None
    case("replace-from-null", before, questions())

    before = {"entries": [{"criterion_name": "Claim", "final_score": 4, "delta": 1}], "final_feedback": "Good."}
    after = {
        "entries": [
            {"criterion_name": "Claim", "final_score": 5, "delta": 2, "rationale": "The responses held up."}
        ],
        "final_feedback": "Strong revision.",
    }
    case("mixed-replace-and-add-in-list-element", before, after)

    after = rubric()
    after["criteria"][0]["levels"] = "collapsed"
    case("list-replaced-by-scalar", rubric(), after)

    before = rubric()
    after = rubric()
    before["threshold"] = 70.5
    after["threshold"] = 82.5
    case("fractional-number-replace", before, after)

    return cases


def main() -> None:
    cases = build_cases()
    names = [c["name"] for c in cases]
    if len(names) != len(set(names)):
        raise SystemExit("duplicate case names")
    for case in cases:
        entries = compute_diff(case["before"], case["after"])
        case["entries"] = [entry.to_dict() for entry in entries]
    OUT_PATH.parent.mkdir(parents=True, exist_ok=True)
    OUT_PATH.write_text(json.dumps({"count": len(cases), "cases": cases}, indent=2, sort_keys=True) + "\n")
    total_entries = sum(len(c["entries"]) for c in cases)
    print(f"wrote {len(cases)} diff cases ({total_entries} entries) to {OUT_PATH}")


if __name__ == "__main__":
    main()
