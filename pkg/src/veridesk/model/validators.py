"""Document validators for untrusted artifact candidates.

These take parsed JSON documents (from a model response, an import, or an
API body), check every stated invariant, and either return the typed
artifact or raise ValidationError carrying the complete violation list.
Totals claimed inside a document are never trusted; they are recomputed
from the rubric and the per-criterion scores.
"""

from __future__ import annotations

from typing import Any, Mapping

from .. import scoring
from .canonical import content_hash
from .errors import (
    AlignmentError,
    DeltaArithmeticError,
    DuplicateCriterionError,
    DuplicateQuestionIdError,
    EmptyDescriptorError,
    EmptyQuestionSetError,
    EmptyRubricError,
    EmptyTextError,
    InitialScoreMismatchError,
    InvalidWeightError,
    MalformedFieldError,
    MissingLevelError,
    MissingTargetCriterionError,
    ScoreRangeError,
    SchemaVersionError,
    TooManyQuestionsError,
    UnexpectedLevelError,
    UnknownCriterionError,
    ValidationError,
    Violation,
    WeightSumError,
)
from .types import (
    LEVEL_ORDINALS,
    SCHEMA_VERSION,
    SCORE_MAX,
    SCORE_MIN,
    Criterion,
    FollowUpQuestion,
    InitialAssessment,
    PerformanceLevel,
    Provenance,
    QuestionKind,
    QuestionSet,
    Reassessment,
    ReassessedCriterion,
    Rubric,
    canon_name,
)


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_text(value: Any) -> bool:
    return isinstance(value, str) and bool(value.strip())


def _check_schema_version(doc: Mapping, out: list[Violation]) -> None:
    found = doc.get("schema_version", SCHEMA_VERSION)
    if found != SCHEMA_VERSION:
        out.append(SchemaVersionError(found=found))


def _raise_or(violations: list[Violation]):
    if violations:
        raise ValidationError(violations)


def validate_rubric(
    candidate: Any,
    *,
    rubric_id: str | None = None,
    assignment_id: str = "",
    provenance: Provenance = Provenance.GENERATED,
    version: int = 1,
) -> Rubric:
    """Validate an untrusted rubric document and build the Rubric.

    Violations are collected exhaustively. The weight-sum rule is only
    checked when every individual weight is a well-formed positive integer,
    so a malformed weight does not also produce a misleading sum error.
    """
    violations: list[Violation] = []
    if not isinstance(candidate, Mapping):
        raise ValidationError([MalformedFieldError(path=".", expected="rubric document object")])
    _check_schema_version(candidate, violations)

    raw_criteria = candidate.get("criteria")
    if raw_criteria is None or not isinstance(raw_criteria, list):
        violations.append(MalformedFieldError(path="criteria", expected="array of criteria"))
        _raise_or(violations)
    if not raw_criteria:
        violations.append(EmptyRubricError())
        _raise_or(violations)

    weights_ok = True
    seen_names: set[str] = set()
    parsed: list[Criterion | None] = []
    for i, raw in enumerate(raw_criteria):
        base = f"criteria[{i}]"
        if not isinstance(raw, Mapping):
            violations.append(MalformedFieldError(path=base, expected="criterion object"))
            weights_ok = False
            parsed.append(None)
            continue

        name = raw.get("criterion_name")
        if not _is_text(name):
            violations.append(EmptyTextError(path=f"{base}.criterion_name"))
            name = None
        elif canon_name(name) in seen_names:
            violations.append(DuplicateCriterionError(name=name))
            name = None
        else:
            seen_names.add(canon_name(name))

        weight = raw.get("weight")
        if not _is_int(weight) or weight < 1:
            violations.append(
                InvalidWeightError(criterion=name or base, weight=weight)
            )
            weights_ok = False
            weight = None

        description = raw.get("description")
        if not _is_text(description):
            violations.append(EmptyDescriptorError(path=f"{base}.description"))
            description = None

        levels = _validate_levels(raw.get("levels"), name or base, base, violations)

        if name and weight and description and levels is not None:
            parsed.append(
                Criterion(name=name, weight=weight, description=description, levels=levels)
            )
        else:
            parsed.append(None)

    if weights_ok:
        total = sum(raw.get("weight") for raw in raw_criteria if isinstance(raw, Mapping))
        if total != 100:
            violations.append(WeightSumError(actual_sum=total))

    _raise_or(violations)

    criteria = tuple(c for c in parsed if c is not None)
    if rubric_id is None:
        rubric_id = "rubric-" + content_hash([c.to_dict() for c in criteria])[:12]
    return Rubric(
        rubric_id=rubric_id,
        assignment_id=assignment_id,
        criteria=criteria,
        provenance=provenance,
        version=version,
    )


def _validate_levels(
    raw_levels: Any, criterion_label: str, base: str, out: list[Violation]
) -> tuple[PerformanceLevel, ...] | None:
    if not isinstance(raw_levels, list):
        out.append(MalformedFieldError(path=f"{base}.levels", expected="array of levels"))
        return None
    ordinals: list[int] = []
    parsed: list[PerformanceLevel | None] = []
    ok = True
    for j, raw in enumerate(raw_levels):
        path = f"{base}.levels[{j}]"
        if not isinstance(raw, Mapping):
            out.append(MalformedFieldError(path=path, expected="level object"))
            ok = False
            continue
        level = raw.get("level")
        if not _is_int(level):
            out.append(MalformedFieldError(path=f"{path}.level", expected="integer 1-5"))
            ok = False
            level = None
        else:
            ordinals.append(level)
        desc = raw.get("desc")
        if not _is_text(desc):
            out.append(EmptyDescriptorError(path=f"{path}.desc"))
            ok = False
            desc = None
        if level is not None and level in LEVEL_ORDINALS and desc is not None:
            parsed.append(PerformanceLevel(level=level, descriptor=desc))
        else:
            parsed.append(None)

    missing = tuple(o for o in LEVEL_ORDINALS if o not in ordinals)
    if missing:
        out.append(MissingLevelError(criterion=criterion_label, missing_ordinals=missing))
        ok = False
    unexpected = tuple(
        sorted({o for o in ordinals if o not in LEVEL_ORDINALS or ordinals.count(o) > 1})
    )
    if unexpected:
        out.append(UnexpectedLevelError(criterion=criterion_label, ordinals=unexpected))
        ok = False
    if not ok or any(p is None for p in parsed):
        return None
    return tuple(parsed)  # type: ignore[arg-type]


def validate_question_set(
    candidate: Any,
    rubric: Rubric,
    *,
    provenance: Provenance = Provenance.GENERATED,
) -> QuestionSet:
    """Validate an untrusted follow-up question list against the rubric.

    Accepts either ``{"questions": [...]}`` or a bare array. Questions
    missing a question_id get deterministic ids q1, q2, q3 by position.
    """
    violations: list[Violation] = []
    if isinstance(candidate, Mapping):
        _check_schema_version(candidate, violations)
        raw_questions = candidate.get("questions")
    else:
        raw_questions = candidate
    if not isinstance(raw_questions, list):
        violations.append(MalformedFieldError(path="questions", expected="array of questions"))
        raise ValidationError(violations)

    if not raw_questions:
        violations.append(EmptyQuestionSetError())
        _raise_or(violations)
    if len(raw_questions) > 3:
        violations.append(TooManyQuestionsError(count=len(raw_questions)))

    seen_ids: set[str] = set()
    parsed: list[FollowUpQuestion | None] = []
    for i, raw in enumerate(raw_questions):
        base = f"questions[{i}]"
        if not isinstance(raw, Mapping):
            violations.append(MalformedFieldError(path=base, expected="question object"))
            parsed.append(None)
            continue

        question_id = raw.get("question_id")
        if question_id is None:
            question_id = f"q{i + 1}"
        elif not _is_text(question_id):
            violations.append(EmptyTextError(path=f"{base}.question_id"))
            question_id = f"q{i + 1}"
        if question_id in seen_ids:
            violations.append(DuplicateQuestionIdError(question_id=question_id))
            parsed.append(None)
            continue
        seen_ids.add(question_id)

        kind_raw = raw.get("kind")
        try:
            kind = QuestionKind(kind_raw)
        except ValueError:
            violations.append(
                MalformedFieldError(path=f"{base}.kind", expected="evaluative or authenticity")
            )
            parsed.append(None)
            continue

        text = raw.get("text")
        text_ok = _is_text(text)
        if not text_ok:
            violations.append(EmptyTextError(path=f"{base}.text"))

        target = raw.get("target_criterion")
        target_ok = True
        if target is not None and not isinstance(target, str):
            violations.append(
                MalformedFieldError(path=f"{base}.target_criterion", expected="string or null")
            )
            target_ok = False
        elif kind is QuestionKind.EVALUATIVE and not _is_text(target):
            violations.append(MissingTargetCriterionError(question_id=question_id))
            target_ok = False
        elif _is_text(target) and not rubric.has_criterion(target):
            violations.append(UnknownCriterionError(question_id=question_id, name=target))
            target_ok = False

        if text_ok and target_ok:
            parsed.append(
                FollowUpQuestion(
                    question_id=question_id,
                    kind=kind,
                    text=text,
                    target_criterion=target if _is_text(target) else None,
                )
            )
        else:
            parsed.append(None)

    _raise_or(violations)
    return QuestionSet(
        questions=tuple(q for q in parsed if q is not None), provenance=provenance
    )


def _validate_score_entry(
    raw: Any, base: str, out: list[Violation]
) -> tuple[str | None, int | None, str | None]:
    """Shared shape check for {criterion_name, score, justification} rows."""
    if not isinstance(raw, Mapping):
        out.append(MalformedFieldError(path=base, expected="score object"))
        return None, None, None
    name = raw.get("criterion_name")
    if not _is_text(name):
        out.append(EmptyTextError(path=f"{base}.criterion_name"))
        name = None
    score = raw.get("score")
    label = name or base
    if not _is_int(score) or not SCORE_MIN <= score <= SCORE_MAX:
        out.append(ScoreRangeError(path=f"scores[{label}]", score=score))
        score = None
    justification = raw.get("justification")
    if not _is_text(justification):
        out.append(EmptyTextError(path=f"{base}.justification"))
        justification = None
    return name, score, justification


def _check_rubric_alignment(
    names: list[str], rubric: Rubric, out: list[Violation]
) -> None:
    trimmed = [n.strip() for n in names]
    rubric_names = [c.name.strip() for c in rubric.criteria]
    duplicates = {n for n in trimmed if trimmed.count(n) > 1}
    for name in sorted(duplicates):
        out.append(DuplicateCriterionError(name=name))
    missing = tuple(n for n in rubric_names if n not in trimmed)
    extra = tuple(n for n in trimmed if n not in rubric_names and n not in duplicates)
    if missing or extra:
        out.append(AlignmentError(missing=missing, extra=extra))


def validate_initial_scores(
    candidate: Any,
    rubric: Rubric,
    *,
    provenance: Provenance = Provenance.GENERATED,
) -> InitialAssessment:
    """Validate untrusted per-criterion scores and recompute the total.

    Accepts ``{"scores": [...]}`` or a bare array. Any weighted total in
    the document is ignored; the stored total always comes from the
    scoring engine.
    """
    violations: list[Violation] = []
    if isinstance(candidate, Mapping):
        _check_schema_version(candidate, violations)
        raw_scores = candidate.get("scores")
    else:
        raw_scores = candidate
    if not isinstance(raw_scores, list):
        violations.append(MalformedFieldError(path="scores", expected="array of scores"))
        raise ValidationError(violations)

    rows = []
    names = []
    for i, raw in enumerate(raw_scores):
        name, score, justification = _validate_score_entry(raw, f"scores[{i}]", violations)
        if name is not None:
            names.append(name)
        rows.append((name, score, justification))

    _check_rubric_alignment(names, rubric, violations)
    _raise_or(violations)

    from .types import CriterionScore

    entries = [
        CriterionScore(criterion_name=name, score=score, justification=justification)
        for name, score, justification in rows
    ]
    return InitialAssessment.build(rubric, entries, provenance=provenance)


def validate_reassessment(
    candidate: Any,
    rubric: Rubric,
    initial: InitialAssessment | None = None,
    *,
    provenance: Provenance = Provenance.GENERATED,
) -> Reassessment:
    """Validate an untrusted reassessment against the rubric and, when
    given, the approved initial assessment.

    Checks per-entry delta arithmetic, bijection with the rubric, and
    (with ``initial``) that each claimed initial score matches the approved
    one. The final weighted total is recomputed, never copied.
    """
    violations: list[Violation] = []
    if not isinstance(candidate, Mapping):
        raise ValidationError(
            [MalformedFieldError(path=".", expected="reassessment document object")]
        )
    _check_schema_version(candidate, violations)

    raw_entries = candidate.get("entries")
    if not isinstance(raw_entries, list):
        violations.append(MalformedFieldError(path="entries", expected="array of entries"))
        raise ValidationError(violations)

    final_feedback = candidate.get("final_feedback")
    if not _is_text(final_feedback):
        violations.append(EmptyTextError(path="final_feedback"))

    rows = []
    names = []
    for i, raw in enumerate(raw_entries):
        base = f"entries[{i}]"
        if not isinstance(raw, Mapping):
            violations.append(MalformedFieldError(path=base, expected="entry object"))
            continue
        name = raw.get("criterion_name")
        if not _is_text(name):
            violations.append(EmptyTextError(path=f"{base}.criterion_name"))
            name = None
        else:
            names.append(name)
        label = name or base

        scores_ok = True
        initial_score = raw.get("initial_score")
        if not _is_int(initial_score) or not SCORE_MIN <= initial_score <= SCORE_MAX:
            violations.append(
                ScoreRangeError(path=f"entries[{label}].initial_score", score=initial_score)
            )
            scores_ok = False
        final_score = raw.get("final_score")
        if not _is_int(final_score) or not SCORE_MIN <= final_score <= SCORE_MAX:
            violations.append(
                ScoreRangeError(path=f"entries[{label}].final_score", score=final_score)
            )
            scores_ok = False

        delta = raw.get("delta")
        if scores_ok:
            if not _is_int(delta) or delta != final_score - initial_score:
                violations.append(DeltaArithmeticError(criterion=label))
                scores_ok = False

        if scores_ok and initial is not None and name is not None:
            try:
                approved = initial.score_for(name)
            except ValidationError:
                approved = None  # alignment reported separately
            if approved is not None and approved.score != initial_score:
                violations.append(InitialScoreMismatchError(criterion=name))

        rationale = raw.get("rationale")
        if not _is_text(rationale):
            violations.append(EmptyTextError(path=f"entries[{label}].rationale"))
            rationale = None

        rows.append((name, initial_score, final_score, delta, rationale, scores_ok))

    _check_rubric_alignment(names, rubric, violations)
    _raise_or(violations)

    entries = [
        ReassessedCriterion(
            criterion_name=name,
            initial_score=initial_score,
            final_score=final_score,
            delta=delta,
            rationale=rationale,
        )
        for name, initial_score, final_score, delta, rationale, _ in rows
    ]
    ordered = {e.criterion_name.strip(): e for e in entries}
    entries = [ordered[c.name.strip()] for c in rubric.criteria]
    final_total = scoring.weighted_total_tenths(
        rubric, {e.criterion_name: e.final_score for e in entries}
    )
    return Reassessment(
        entries=tuple(entries),
        final_weighted_total_tenths=final_total,
        final_feedback=final_feedback,
        provenance=provenance,
    )
