"""Batch and operator command line.

Subcommands:

* ``ingest``  — load an assignment, its materials, and a directory of
  submissions; creates one case per submission and stages each submission
  for upload when scoring starts. Prints a case-id manifest.
* ``run``     — drive one or more cases through a stage (or ``all``)
  headlessly, with scripted or live generation and non-interactive
  approvals from an edits file.
* ``report``  — render a case as JSON or markdown.
* ``export``  — write a case's audit bundle (canonical JSON bytes).
* ``serve``   — run the HTTP API.

Exit codes: 0 ok, 2 input error, 3 transition error, 4 provider error.
The CLI talks to the same engine the HTTP service uses, so a pipeline run
here and the same run over HTTP produce byte-identical audit bundles.
"""

from __future__ import annotations

import json
import sys
import threading
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click

from .errors import NotFoundError, VerideskError
from .gateway.errors import MissingContextError, ProviderError, SchemaFailureExhaustedError
from .model.errors import KindMismatchError, ValidationError
from .model.types import AssignmentContext
from .service.reports import report_document, report_markdown
from .service.views import instructor_view
from .settings import Settings, build_service, load_script, load_settings
from .store.bundle import bundle_bytes, export_bundle
from .store.store import ConflictError, EventStore, StorageError
from .workflow.errors import TransitionError

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_TRANSITION = 3
EXIT_PROVIDER = 4

STAGES = ("rubric", "scores", "questions", "responses", "reassess", "skip-stage2", "all")

DEFAULT_STORE_FILE = "veridesk.db"


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, (ProviderError, SchemaFailureExhaustedError)):
        return EXIT_PROVIDER
    if isinstance(exc, (TransitionError, ConflictError)):
        return EXIT_TRANSITION
    if isinstance(
        exc,
        (
            MissingContextError,
            ValidationError,
            KindMismatchError,
            NotFoundError,
            ValueError,
            OSError,
        ),
    ):
        return EXIT_INPUT
    if isinstance(exc, StorageError):
        return 1
    if isinstance(exc, VerideskError):
        return EXIT_INPUT
    return 1


class StageFailure(click.ClickException):
    """A domain error with the documented exit code attached."""

    def __init__(self, exc: BaseException):
        super().__init__(str(exc))
        self.exit_code = exit_code_for(exc)


def _resolve_settings(ctx: click.Context, **overrides) -> Settings:
    base = dict(ctx.obj["overrides"])
    base.update({k: v for k, v in overrides.items() if v is not None})
    settings = load_settings(config_path=ctx.obj["config"], overrides=base)
    if not ctx.obj["store_was_set"] and settings.store == ":memory:":
        # A fresh in-memory store per process would lose everything between
        # commands, so the CLI defaults to a file in the working directory.
        settings.store = DEFAULT_STORE_FILE
    return settings


@click.group()
@click.option("--store", default=None, metavar="PATH",
              help=f"SQLite store path (default: {DEFAULT_STORE_FILE}).")
@click.option("--config", default=None, type=click.Path(exists=True, dir_okay=False),
              help="key=value config file.")
@click.option("--deterministic/--no-deterministic", default=None,
              help="Fixed clock and counter ids for reproducible runs.")
@click.pass_context
def main(ctx, store, config, deterministic):
    """Two-stage assisted assessment workflow, from the terminal."""
    overrides: dict = {}
    if store is not None:
        overrides["store"] = store
    if deterministic is not None:
        overrides["deterministic"] = deterministic
    ctx.obj = {
        "config": config,
        "overrides": overrides,
        "store_was_set": store is not None or config is not None,
    }


# -- ingest -------------------------------------------------------------------


def _read_assignment(path: Path) -> dict:
    document = json.loads(path.read_text(encoding="utf-8"))
    if not isinstance(document, dict):
        raise ValueError(f"{path}: assignment must be a JSON object")
    for field in ("assignment_id", "prompt"):
        value = document.get(field)
        if not isinstance(value, str) or not value.strip():
            raise ValueError(f"{path}: missing or empty field {field!r}")
    reveal = document.get("reveal_initial_scores", False)
    if not isinstance(reveal, bool):
        raise ValueError(f"{path}: reveal_initial_scores must be a boolean")
    return document


def _read_materials(directory: Path | None) -> tuple[str, str | None]:
    """Concatenate the materials directory into course text; any file named
    ``syllabus.*`` becomes the syllabus instead."""
    if directory is None:
        return "", None
    course_parts: list[str] = []
    syllabus: str | None = None
    for path in sorted(p for p in directory.iterdir() if p.is_file()):
        text = path.read_text(encoding="utf-8")
        if path.stem.lower() == "syllabus":
            syllabus = text
        else:
            course_parts.append(text.strip())
    return "\n\n".join(part for part in course_parts if part), syllabus


def _read_submission(path: Path) -> dict:
    if path.suffix == ".json":
        document = json.loads(path.read_text(encoding="utf-8"))
        if (
            not isinstance(document, dict)
            or not isinstance(document.get("author_ref"), str)
            or not document["author_ref"].strip()
            or not isinstance(document.get("body"), str)
            or not document["body"].strip()
        ):
            raise ValueError("expected an object with author_ref and body")
        return {"author_ref": document["author_ref"], "body": document["body"]}
    body = path.read_text(encoding="utf-8")
    if not body.strip():
        raise ValueError("submission file is empty")
    return {"author_ref": path.stem, "body": body}


@main.command()
@click.option("--assignment", "assignment_path", required=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="Assignment JSON: {assignment_id, prompt, reveal_initial_scores?}.")
@click.option("--materials", "materials_dir", default=None,
              type=click.Path(exists=True, file_okay=False, path_type=Path),
              help="Directory of course material files; syllabus.* is special-cased.")
@click.option("--submissions", "submissions_dir", required=True,
              type=click.Path(exists=True, file_okay=False, path_type=Path),
              help="Directory of submissions: *.txt (author = file stem) or *.json.")
@click.pass_context
def ingest(ctx, assignment_path, materials_dir, submissions_dir):
    """Create one case per submission; print the case-id manifest."""
    settings = _resolve_settings(ctx)
    try:
        assignment = _read_assignment(assignment_path)
        course_material, syllabus = _read_materials(materials_dir)
    except (ValueError, json.JSONDecodeError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INPUT)

    submission_files = sorted(
        p for p in submissions_dir.iterdir()
        if p.is_file() and p.suffix in (".txt", ".json")
    )
    parsed = []
    failures = []
    for path in submission_files:
        try:
            parsed.append((path, _read_submission(path)))
        except (ValueError, json.JSONDecodeError) as exc:
            failures.append((path, str(exc)))
    if failures:
        for path, message in failures:
            click.echo(f"error: {path}: {message}", err=True)
        sys.exit(EXIT_INPUT)
    if not parsed:
        click.echo(f"warning: no submissions found in {submissions_dir}", err=True)

    service = build_service(settings)
    materials = AssignmentContext(
        assignment_prompt=assignment["prompt"],
        course_material=course_material,
        syllabus=syllabus,
        reveal_initial_scores=assignment.get("reveal_initial_scores", False),
    )
    for path, submission in parsed:
        case = service.create_case(assignment["assignment_id"], materials)
        service.store.stage_submission(case.case_id, submission)
        click.echo(case.case_id)


# -- run ----------------------------------------------------------------------


def _load_json_file(path: str):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ValueError(f"{path}: {exc}") from exc


def _responses_items(document) -> list[tuple[str, str]]:
    if isinstance(document, dict):
        items = list(document.items())
    elif isinstance(document, list):
        items = [(row.get("question_id"), row.get("body")) for row in document]
    else:
        raise ValueError("responses file must be an object or an array")
    for question_id, body in items:
        if not isinstance(question_id, str) or not isinstance(body, str):
            raise ValueError("each response needs a question_id and a body string")
    return items


class StageRunner:
    """Drives one case through the requested stages against the service."""

    def __init__(self, service, *, approve: bool, edits_doc, responses_doc, actor: str):
        self.service = service
        self.approve = approve
        self.edits_doc = edits_doc
        self.responses_doc = responses_doc
        self.actor = actor

    def _edits_for(self, stage_key: str):
        if self.edits_doc is None:
            return ()
        if isinstance(self.edits_doc, list):
            return self.service.approval_edits(self.edits_doc)
        return self.service.approval_edits(self.edits_doc.get(stage_key, []))

    def _emit(self, out: list[str], case, note: str, artifact: dict | None = None):
        state = instructor_view(case)["state"]
        out.append(f"{case.case_id}: {note} -> {state}")
        if artifact is not None:
            out.append(json.dumps(artifact, indent=2, ensure_ascii=False))

    def _generate_and_approve(
        self, out, case_id, stage_key, generate, approve_method, artifact_key
    ):
        case, outcome = generate(case_id)
        view = instructor_view(case)
        self._emit(
            out, case,
            f"{stage_key} drafted (attempts: {outcome.attempts_used})",
            view[artifact_key],
        )
        if self.approve:
            case = approve_method(case_id, self.actor, self._edits_for(stage_key))
            self._emit(out, case, f"{stage_key} approved")
        return case

    def _upload_staged(self, out, case_id):
        case = self.service.get_case(case_id)
        if case.submission is not None:
            return
        staged = self.service.store.staged_submission(case_id)
        if staged is None:
            return
        case = self.service.upload_submission(
            case_id, staged["author_ref"], staged["body"], actor_ref=self.actor
        )
        self._emit(out, case, f"submission uploaded for {staged['author_ref']}")

    def stage_rubric(self, out, case_id):
        self._generate_and_approve(
            out, case_id, "rubric",
            self.service.generate_rubric, self.service.approve_rubric, "rubric",
        )

    def stage_scores(self, out, case_id):
        self._upload_staged(out, case_id)
        self._generate_and_approve(
            out, case_id, "scores",
            self.service.generate_scores, self.service.approve_scores, "initial",
        )

    def stage_questions(self, out, case_id):
        case = self._generate_and_approve(
            out, case_id, "questions",
            self.service.generate_questions, self.service.approve_questions, "questions",
        )
        if self.approve:
            case = self.service.send_questions(case_id, actor_ref=self.actor)
            self._emit(out, case, "questions sent")

    def stage_responses(self, out, case_id):
        if self.responses_doc is None:
            raise ValueError("--responses FILE is required for the responses stage")
        for question_id, body in _responses_items(self.responses_doc):
            case = self.service.record_response(case_id, question_id, body)
            self._emit(out, case, f"response recorded for {question_id}")

    def stage_reassess(self, out, case_id):
        self._generate_and_approve(
            out, case_id, "reassess",
            self.service.generate_reassessment,
            self.service.approve_reassessment,
            "reassessment",
        )

    def stage_skip(self, out, case_id):
        case = self.service.skip_stage2(case_id, actor_ref=self.actor)
        self._emit(out, case, "stage 2 skipped; finalized with initial scores")

    def run_stage(self, out, case_id, stage):
        handlers = {
            "rubric": self.stage_rubric,
            "scores": self.stage_scores,
            "questions": self.stage_questions,
            "responses": self.stage_responses,
            "reassess": self.stage_reassess,
            "skip-stage2": self.stage_skip,
        }
        if stage == "all":
            for key in ("rubric", "scores", "questions", "responses", "reassess"):
                handlers[key](out, case_id)
        else:
            handlers[stage](out, case_id)


@main.command()
@click.argument("case_ids", nargs=-1, required=True)
@click.option("--stage", type=click.Choice(STAGES), required=True)
@click.option("--provider", "provider_kind", type=click.Choice(["mock", "live"]),
              default=None, help="Generation backend (default from settings).")
@click.option("--script", "script_path", default=None,
              type=click.Path(exists=True, dir_okay=False),
              help="Scripted responses for the mock provider (JSON by task).")
@click.option("--approve", is_flag=True, default=False,
              help="Approve each generated artifact without edits.")
@click.option("--approve-with", "approve_with", default=None,
              type=click.Path(exists=True, dir_okay=False),
              help="Apply the edits in this JSON file while approving; implies --approve.")
@click.option("--responses", "responses_path", default=None,
              type=click.Path(exists=True, dir_okay=False),
              help="Student responses file: {question_id: body} or an array.")
@click.option("--actor", default="instructor", show_default=True,
              help="Actor recorded on approvals and uploads.")
@click.option("--parallel", default=1, show_default=True, type=click.IntRange(1, 64),
              help="Cases driven concurrently.")
@click.pass_context
def run(ctx, case_ids, stage, provider_kind, script_path, approve, approve_with,
        responses_path, actor, parallel):
    """Run a workflow stage (or 'all') for each CASE_ID."""
    provider_override = {"mock": "mock", "live": "http"}.get(provider_kind)
    settings = _resolve_settings(ctx, provider=provider_override)
    if settings.deterministic and parallel > 1:
        click.echo("error: deterministic mode requires --parallel 1", err=True)
        sys.exit(EXIT_INPUT)

    try:
        script = load_script(script_path) if script_path else None
        edits_doc = _load_json_file(approve_with) if approve_with else None
        responses_doc = _load_json_file(responses_path) if responses_path else None
        if edits_doc is not None and not isinstance(edits_doc, (dict, list)):
            raise ValueError(f"{approve_with}: expected an object keyed by stage or an array")
        if isinstance(edits_doc, list) and stage == "all":
            raise ValueError("--stage all needs stage-keyed edits, not a bare array")
        service = build_service(settings, script=script)
    except (ValueError, VerideskError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INPUT)

    if stage == "all" and not (approve or approve_with):
        click.echo("error: --stage all requires --approve or --approve-with", err=True)
        sys.exit(EXIT_INPUT)

    runner = StageRunner(
        service,
        approve=approve or approve_with is not None,
        edits_doc=edits_doc,
        responses_doc=responses_doc,
        actor=actor,
    )

    print_lock = threading.Lock()

    def drive(case_id: str) -> int:
        out: list[str] = []
        code = EXIT_OK
        try:
            runner.run_stage(out, case_id, stage)
        except Exception as exc:  # noqa: BLE001 - mapped to exit codes
            code = exit_code_for(exc)
            out.append(f"error: {case_id}: {exc}")
        with print_lock:
            for line in out:
                click.echo(line, err=(code != EXIT_OK and line.startswith("error:")))
        return code

    if parallel == 1 or len(case_ids) == 1:
        codes = [drive(case_id) for case_id in case_ids]
    else:
        with ThreadPoolExecutor(max_workers=parallel) as pool:
            codes = list(pool.map(drive, case_ids))
    sys.exit(max(codes))


# -- report -------------------------------------------------------------------


@main.command()
@click.argument("case_ids", nargs=-1)
@click.option("--all", "report_all", is_flag=True, default=False,
              help="Report every case in the store.")
@click.option("--format", "fmt", type=click.Choice(["json", "markdown"]),
              default="markdown", show_default=True)
@click.option("--out", "out_dir", default=None,
              type=click.Path(file_okay=False, path_type=Path),
              help="Write one file per case here instead of stdout.")
@click.pass_context
def report(ctx, case_ids, report_all, fmt, out_dir):
    """Render assessment reports."""
    settings = _resolve_settings(ctx)
    store = EventStore(settings.store)
    if report_all:
        case_ids = tuple(store.list_cases())
    elif not case_ids:
        click.echo("error: pass CASE_ID arguments or --all", err=True)
        sys.exit(EXIT_INPUT)

    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
    for case_id in case_ids:
        try:
            case = store.load_case(case_id)
        except NotFoundError as exc:
            raise StageFailure(exc) from exc
        if fmt == "json":
            rendered = json.dumps(report_document(case), indent=2, ensure_ascii=False)
            suffix = "json"
        else:
            rendered = report_markdown(case)
            suffix = "md"
        if out_dir is None:
            click.echo(rendered)
        else:
            target = out_dir / f"{case_id}.{suffix}"
            target.write_text(rendered + "\n", encoding="utf-8")
            click.echo(str(target))


# -- export -------------------------------------------------------------------


@main.command()
@click.argument("case_id")
@click.option("--out", "out_path", default=None,
              type=click.Path(dir_okay=False, path_type=Path),
              help="Write the bundle here (default: stdout).")
@click.pass_context
def export(ctx, case_id, out_path):
    """Write a case's audit bundle as canonical JSON bytes."""
    settings = _resolve_settings(ctx)
    store = EventStore(settings.store)
    try:
        data = bundle_bytes(export_bundle(store, case_id))
    except NotFoundError as exc:
        raise StageFailure(exc) from exc
    if out_path is None:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.write(b"\n")
    else:
        out_path.write_bytes(data)
        click.echo(str(out_path))


# -- serve --------------------------------------------------------------------


@main.command()
@click.option("--host", default=None, help="Bind address (default from settings).")
@click.option("--port", default=None, type=int, help="Port (default from settings).")
@click.pass_context
def serve(ctx, host, port):
    """Run the HTTP API with the configured store and provider."""
    import uvicorn

    from .api.app import create_app

    settings = _resolve_settings(ctx, host=host, port=port)
    app = create_app(settings)
    uvicorn.run(app, host=settings.host, port=settings.port, log_level="info")


if __name__ == "__main__":
    main()
