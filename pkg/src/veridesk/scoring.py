"""Exact weighted scoring.

A score vector assigns each rubric criterion an integer from 1 to 5. The
weighted total is sum(weight_i * score_i) / 5 on a 20-100 point scale.
Because weights are integers summing to 100, the total is always an exact
multiple of 0.2 points, so it is stored losslessly as integer tenths of a
point: tenths = 2 * sum(weight_i * score_i). All arithmetic here is
integer or Fraction; binary floating point never touches a stored value.
Rounding exists only in display formatting.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .model.errors import AlignmentError, InitialScoreMismatchError, ScoreRangeError, single
from .model.types import SCORE_MAX, SCORE_MIN, Rubric


def check_alignment(rubric: Rubric, scores: Mapping[str, int]) -> None:
    """Require the score vector's keys to biject with the rubric's criteria.

    Names match after trimming surrounding whitespace. Raises a single
    AlignmentError listing both missing and extra names.
    """
    rubric_names = [c.name.strip() for c in rubric.criteria]
    vector_names = [name.strip() for name in scores]
    missing = tuple(n for n in rubric_names if n not in vector_names)
    extra = tuple(n for n in vector_names if n not in rubric_names)
    if missing or extra or len(vector_names) != len(set(vector_names)):
        raise single(AlignmentError(missing=missing, extra=extra))


def _checked_scores(rubric: Rubric, scores: Mapping[str, int]) -> list[tuple[int, int]]:
    check_alignment(rubric, scores)
    trimmed = {name.strip(): value for name, value in scores.items()}
    pairs = []
    for criterion in rubric.criteria:
        value = trimmed[criterion.name.strip()]
        if not isinstance(value, int) or isinstance(value, bool) or not SCORE_MIN <= value <= SCORE_MAX:
            raise single(ScoreRangeError(path=f"scores[{criterion.name}]", score=value))
        pairs.append((criterion.weight, value))
    return pairs


def weighted_total_points(rubric: Rubric, scores: Mapping[str, int]) -> Fraction:
    """Exact weighted total in points, as a Fraction on [20, 100]."""
    pairs = _checked_scores(rubric, scores)
    return Fraction(sum(w * s for w, s in pairs), 5)


def weighted_total_tenths(rubric: Rubric, scores: Mapping[str, int]) -> int:
    """Exact weighted total in integer tenths of a point, on [200, 1000].

    Equals weighted_total_points * 10 with zero remainder: with integer
    weights, sum(w*s)/5 * 10 = 2 * sum(w*s).
    """
    pairs = _checked_scores(rubric, scores)
    return 2 * sum(w * s for w, s in pairs)


def score_delta(initial: int, final: int) -> int:
    """Movement between two 1-5 scores, final minus initial."""
    for label, value in (("initial", initial), ("final", final)):
        if not isinstance(value, int) or isinstance(value, bool) or not SCORE_MIN <= value <= SCORE_MAX:
            raise single(ScoreRangeError(path=label, score=value))
    return final - initial


def merge_reassessment(
    rubric: Rubric, initial, entries
) -> tuple[int, dict[str, int]]:
    """Fold reassessed entries over the initial assessment.

    Verifies the entries biject with the rubric and echo the approved
    initial scores, then returns the recomputed final total (integer
    tenths) and the per-criterion deltas. Totals claimed by the entries
    themselves are ignored.
    """
    final_vector: dict[str, int] = {}
    deltas: dict[str, int] = {}
    for entry in entries:
        approved = initial.score_for(entry.criterion_name)
        if approved.score != entry.initial_score:
            raise single(InitialScoreMismatchError(criterion=entry.criterion_name))
        final_vector[entry.criterion_name] = entry.final_score
        deltas[entry.criterion_name] = score_delta(entry.initial_score, entry.final_score)
    total = weighted_total_tenths(rubric, final_vector)
    return total, deltas


def tenths_to_points(tenths: int) -> Fraction:
    return Fraction(tenths, 10)


def format_tenths(tenths: int) -> str:
    """Render integer tenths as a decimal string, e.g. 710 -> \"71.0\"."""
    sign = "-" if tenths < 0 else ""
    magnitude = abs(tenths)
    return f"{sign}{magnitude // 10}.{magnitude % 10}"
