import math

import pytest

from adaptive_curriculum import (
    AssessmentResult,
    Catalog,
    CatalogError,
    ContentItem,
    InteractionRecord,
    LearnerProfile,
    Modality,
    RollingMetrics,
    ValidationError,
    validate_profile,
)
from tests.conftest import make_item


def test_content_item_rejects_empty_skills():
    with pytest.raises(ValidationError):
        make_item("x", {}, 0.5)


def test_content_item_rejects_all_zero_weights():
    with pytest.raises(ValidationError, match="positive skill weight"):
        make_item("x", {"a": 0.0}, 0.5)


def test_content_item_rejects_out_of_range_difficulty():
    with pytest.raises(ValidationError):
        make_item("x", {"a": 1.0}, 1.5)
    with pytest.raises(ValidationError):
        make_item("x", {"a": 1.0}, -0.1)


def test_content_item_rejects_nan_weight():
    with pytest.raises(ValidationError):
        make_item("x", {"a": math.nan}, 0.5)


def test_content_item_rejects_nonpositive_duration():
    with pytest.raises(ValidationError, match="duration"):
        make_item("x", {"a": 1.0}, 0.5, duration=0.0)


def test_taught_skills_sorted_and_positive_only():
    item = make_item("x", {"b": 0.5, "a": 1.0, "c": 0.0}, 0.5)
    assert item.taught_skills() == ("a", "b")


def test_catalog_rejects_unknown_skill_prereq():
    with pytest.raises(CatalogError, match="'ghost'"):
        Catalog(skill_prereqs={"a": ("ghost",)}, items={})


def test_catalog_rejects_item_with_unknown_skill():
    item = make_item("x", {"ghost": 1.0}, 0.5)
    with pytest.raises(CatalogError, match="'x'"):
        Catalog(skill_prereqs={"a": ()}, items={"x": item})


def test_catalog_rejects_item_with_unknown_prereq_skill():
    item = make_item("x", {"a": 1.0}, 0.5, prerequisites={"ghost": 0.3})
    with pytest.raises(CatalogError, match="'ghost'"):
        Catalog(skill_prereqs={"a": ()}, items={"x": item})


def test_catalog_rejects_mismatched_item_key():
    item = make_item("x", {"a": 1.0}, 0.5)
    with pytest.raises(CatalogError, match="key"):
        Catalog(skill_prereqs={"a": ()}, items={"y": item})


def test_catalog_detects_prereq_cycle_naming_a_member():
    with pytest.raises(CatalogError, match="cycle"):
        Catalog(
            skill_prereqs={"a": ("b",), "b": ("c",), "c": ("a",)},
            items={},
        )


def test_catalog_self_cycle():
    with pytest.raises(CatalogError, match="cycle through 'a'"):
        Catalog(skill_prereqs={"a": ("a",)}, items={})


def test_skill_rank_is_longest_chain():
    catalog = Catalog(
        skill_prereqs={
            "root": (),
            "mid": ("root",),
            "side": (),
            "top": ("mid", "side"),
        },
        items={},
    )
    assert catalog.skill_rank == {"root": 0, "side": 0, "mid": 1, "top": 2}


def test_transitive_prereqs_closure():
    catalog = Catalog(
        skill_prereqs={"a": (), "b": ("a",), "c": ("b",)},
        items={},
    )
    assert catalog.transitive_prereqs["c"] == frozenset({"a", "b"})
    assert catalog.transitive_prereqs["a"] == frozenset()


def test_items_for_skill_sorted_and_positive_weight_only(two_skill_catalog):
    assert two_skill_catalog.items_for_skill["alpha"] == ("a-intro", "a-quiz")
    assert two_skill_catalog.items_for_skill["beta"] == ("b-intro",)


def test_quiz_items_for_skill(two_skill_catalog):
    assert two_skill_catalog.quiz_items_for_skill("alpha") == ("a-quiz",)
    assert two_skill_catalog.quiz_items_for_skill("beta") == ()


def test_assessment_result_validation():
    with pytest.raises(ValidationError):
        AssessmentResult("q", {}, 1.0, 10.0, 0)
    with pytest.raises(ValidationError):
        AssessmentResult("q", {"a": 1.0}, 1.2, 10.0, 0)
    with pytest.raises(ValidationError):
        AssessmentResult("q", {"a": 1.0}, 1.0, 0.0, 0)


def test_interaction_record_item_must_match_assessment():
    result = AssessmentResult("quiz-1", {"a": 1.0}, 1.0, 10.0, 3)
    with pytest.raises(ValidationError, match="does not match"):
        InteractionRecord(item_id="other", timestamp=3, assessment=result)


def test_cold_start_profile_defaults(two_skill_catalog):
    profile = LearnerProfile.cold_start("lrn", two_skill_catalog.skill_ids)
    assert profile.mastery == {"alpha": 0.0, "beta": 0.0}
    assert profile.engagement == 0.5
    assert profile.history == ()
    assert profile.preferences == {m.value: 0.5 for m in Modality}
    assert profile.metrics == RollingMetrics.cold_start()


def test_cold_start_signal_vector():
    assert RollingMetrics.cold_start().as_signals() == (0.5, 0.0, 0.5, 0.0, 0.0)


def test_with_mastery_merges_without_mutating():
    profile = LearnerProfile.cold_start("lrn", ["a", "b"])
    bumped = profile.with_mastery({"a": 0.7})
    assert bumped.mastery == {"a": 0.7, "b": 0.0}
    assert profile.mastery == {"a": 0.0, "b": 0.0}


def test_validate_profile_flags_out_of_range_values():
    profile = LearnerProfile(
        learner_id="lrn",
        mastery={"a": 1.5},
        preferences={"video": -0.1},
        engagement=2.0,
    )
    problems = validate_profile(profile)
    assert any("mastery" in p for p in problems)
    assert any("preference" in p for p in problems)
    assert any("engagement" in p for p in problems)


def test_validate_profile_flags_timestamp_regression():
    profile = LearnerProfile(
        learner_id="lrn",
        mastery={},
        preferences={},
        history=(
            InteractionRecord("x", 5),
            InteractionRecord("y", 3),
        ),
    )
    problems = validate_profile(profile)
    assert any("timestamp decreases" in p for p in problems)


def test_validate_profile_clean_cold_start():
    assert validate_profile(LearnerProfile.cold_start("lrn", ["a"])) == []
