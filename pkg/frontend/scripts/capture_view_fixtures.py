"""Capture real server view payloads for the browser test suite.

Drives the deterministic pilot pipeline in process and dumps the
instructor and student projections at each workflow stage to
``frontend/tests/fixtures/views.json``. The browser tests build their fake
transports from these payloads, so the consoles are always tested against
documents the server actually produces. Regenerate after changing either
the view builders or the pilot fixtures:

    python3 frontend/scripts/capture_view_fixtures.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

FRONTEND_DIR = Path(__file__).resolve().parent.parent
REPO_ROOT = FRONTEND_DIR.parent
sys.path.insert(0, str(REPO_ROOT / "tests"))

from support import drive_pilot, make_service  # noqa: E402

from veridesk.service.views import instructor_view, student_view  # noqa: E402

OUT_PATH = FRONTEND_DIR / "tests" / "fixtures" / "views.json"

STAGES = {
    "rubric_drafted": "rubric awaiting approval",
    "scores_drafted": "initial scores awaiting approval",
    "questions_drafted": "question set awaiting approval",
    "awaiting_responses": "questions sent, no responses yet",
    "reassessment_drafted": "reassessment awaiting approval",
    "finalized": "terminal",
}


def main() -> None:
    fixtures: dict[str, dict] = {}
    for stage in STAGES:
        service = make_service()
        case_id = drive_pilot(service, to=stage, author_ref="stu-001")
        case = service.get_case(case_id)
        fixtures[f"instructor/{stage}"] = instructor_view(case)
        fixtures[f"student/{stage}"] = student_view(case, "stu-001")
        if stage == "finalized":
            fixtures["bundle/finalized"] = service.export_case(case_id)

    OUT_PATH.parent.mkdir(parents=True, exist_ok=True)
    OUT_PATH.write_text(json.dumps(fixtures, indent=2, sort_keys=True) + "\n")
    print(f"wrote {len(fixtures)} view payloads to {OUT_PATH}")


if __name__ == "__main__":
    main()
