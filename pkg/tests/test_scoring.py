"""Weighted scoring against an independently derived exact oracle.

The oracle in support.py computes percent-of-maximum with Fraction from
first principles (sum(w*s) out of 5*sum(w), scaled to 100 points, in
tenths); the module under test uses the closed form 2*sum(w*s). Agreement
across random rubrics is the evidence the closed form is right.
"""

from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from support import make_rubric, oracle_total_tenths, random_weights
from veridesk.model.errors import (
    AlignmentError,
    InitialScoreMismatchError,
    ScoreRangeError,
    ValidationError,
)
from veridesk.model.types import CriterionScore, InitialAssessment, ReassessedCriterion
from veridesk.scoring import (
    check_alignment,
    format_tenths,
    merge_reassessment,
    score_delta,
    tenths_to_points,
    weighted_total_points,
    weighted_total_tenths,
)

rubric_and_scores = st.builds(
    lambda seed, count: _case(seed, count),
    st.integers(0, 2**32 - 1),
    st.integers(1, 12),
)


def _case(seed: int, count: int):
    rng = random.Random(seed)
    weights = random_weights(rng, count)
    names = [f"criterion {i}" for i in range(count)]
    scores = {name: rng.randint(1, 5) for name in names}
    return make_rubric(dict(zip(names, weights))), weights, scores


@given(rubric_and_scores)
def test_tenths_match_independent_oracle(case):
    rubric, weights, scores = case
    expected = oracle_total_tenths(weights, [scores[c.name] for c in rubric.criteria])
    assert weighted_total_tenths(rubric, scores) == expected


@given(rubric_and_scores)
def test_points_times_ten_equals_tenths_exactly(case):
    rubric, _, scores = case
    points = weighted_total_points(rubric, scores)
    tenths = weighted_total_tenths(rubric, scores)
    assert points * 10 == tenths
    assert isinstance(points, Fraction)


@given(rubric_and_scores)
def test_total_stays_on_the_200_to_1000_scale(case):
    rubric, _, scores = case
    assert 200 <= weighted_total_tenths(rubric, scores) <= 1000


def test_known_values():
    rubric = make_rubric({"A": 25, "B": 20, "C": 15, "D": 25, "E": 15})
    assert weighted_total_tenths(rubric, {"A": 3, "B": 3, "C": 4, "D": 4, "E": 4}) == 710
    assert weighted_total_tenths(rubric, {"A": 4, "B": 3, "C": 4, "D": 5, "E": 4}) == 810
    all_ones = {n: 1 for n in "ABCDE"}
    all_fives = {n: 5 for n in "ABCDE"}
    assert weighted_total_tenths(rubric, all_ones) == 200
    assert weighted_total_tenths(rubric, all_fives) == 1000


def test_no_floats_anywhere_in_the_result():
    rubric = make_rubric({"A": 33, "B": 33, "C": 34})
    tenths = weighted_total_tenths(rubric, {"A": 2, "B": 3, "C": 4})
    assert isinstance(tenths, int) and not isinstance(tenths, bool)
    assert isinstance(tenths_to_points(tenths), Fraction)


# -- alignment ----------------------------------------------------------------


def test_alignment_reports_missing_and_extra():
    rubric = make_rubric({"Depth": 60, "Clarity": 40})
    with pytest.raises(ValidationError) as e:
        check_alignment(rubric, {"Depth": 3, "Style": 4})
    err = e.value.first(AlignmentError)
    assert err.missing == ("Clarity",)
    assert err.extra == ("Style",)


def test_alignment_trims_whitespace():
    rubric = make_rubric({"Depth": 100})
    check_alignment(rubric, {"  Depth ": 3})
    assert weighted_total_tenths(rubric, {" Depth": 4}) == 800


def test_alignment_rejects_names_colliding_after_trim():
    rubric = make_rubric({"Depth": 100})
    with pytest.raises(ValidationError) as e:
        check_alignment(rubric, {"Depth": 3, " Depth": 4})
    assert e.value.has(AlignmentError)


@pytest.mark.parametrize("bad", [0, 6, True, 2.5, "4"])
def test_out_of_range_scores_rejected(bad):
    rubric = make_rubric({"Depth": 100})
    with pytest.raises(ValidationError) as e:
        weighted_total_tenths(rubric, {"Depth": bad})
    assert e.value.has(ScoreRangeError)


# -- deltas and reassessment merging -------------------------------------------


def test_score_delta():
    assert score_delta(3, 5) == 2
    assert score_delta(5, 3) == -2
    assert score_delta(4, 4) == 0
    with pytest.raises(ValidationError):
        score_delta(0, 4)
    with pytest.raises(ValidationError):
        score_delta(4, 6)


def test_merge_reassessment_recomputes_total_and_deltas():
    rubric = make_rubric({"Depth": 60, "Clarity": 40})
    initial = InitialAssessment.build(
        rubric, [CriterionScore("Depth", 3, "j"), CriterionScore("Clarity", 4, "j")]
    )
    entries = [
        ReassessedCriterion("Depth", 3, 4, 1, "better"),
        ReassessedCriterion("Clarity", 4, 4, 0, "held"),
    ]
    total, deltas = merge_reassessment(rubric, initial, entries)
    assert total == 2 * (60 * 4 + 40 * 4)
    assert deltas == {"Depth": 1, "Clarity": 0}


def test_merge_rejects_entries_that_misreport_initial_scores():
    rubric = make_rubric({"Depth": 100})
    initial = InitialAssessment.build(rubric, [CriterionScore("Depth", 3, "j")])
    with pytest.raises(ValidationError) as e:
        merge_reassessment(rubric, initial, [ReassessedCriterion("Depth", 2, 4, 2, "r")])
    assert e.value.has(InitialScoreMismatchError)


def test_merge_rejects_incomplete_coverage():
    rubric = make_rubric({"Depth": 60, "Clarity": 40})
    initial = InitialAssessment.build(
        rubric, [CriterionScore("Depth", 3, "j"), CriterionScore("Clarity", 4, "j")]
    )
    with pytest.raises(ValidationError) as e:
        merge_reassessment(rubric, initial, [ReassessedCriterion("Depth", 3, 4, 1, "r")])
    assert e.value.has(AlignmentError)


# -- display formatting ---------------------------------------------------------


@pytest.mark.parametrize(
    ("tenths", "text"),
    [(710, "71.0"), (810, "81.0"), (205, "20.5"), (1000, "100.0"), (0, "0.0"), (-15, "-1.5")],
)
def test_format_tenths(tenths, text):
    assert format_tenths(tenths) == text


@given(st.integers(-2000, 2000))
def test_format_tenths_round_trips_through_decimal(tenths):
    from decimal import Decimal

    assert Decimal(format_tenths(tenths)) * 10 == tenths
