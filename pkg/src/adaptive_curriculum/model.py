"""Core domain types: content catalog, learner profile, and interaction history.

Every type here is a frozen dataclass treated as an immutable value. Operations
elsewhere in the package never mutate a profile or catalog in place; they
return new values. Dict-typed fields are owned by their instance and must not
be mutated by callers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Iterable, Mapping

from .errors import CatalogError, ValidationError

__all__ = [
    "Modality",
    "ContentItem",
    "Catalog",
    "AssessmentResult",
    "InteractionRecord",
    "RollingMetrics",
    "FusionConfig",
    "LearnerProfile",
    "SignalVector",
    "validate_profile",
]

SignalVector = tuple[float, float, float, float, float]

#: Number of learner signals consumed by the analytics layer.
SIGNAL_COUNT = 5


class Modality(str, Enum):
    """Delivery format of a content item. Only quizzes produce assessments."""

    VIDEO = "video"
    TEXT = "text"
    EXERCISE = "exercise"
    QUIZ = "quiz"


def _check_unit(value: float, name: str) -> None:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ValidationError(f"{name} must be a number, got {value!r}")
    if math.isnan(value) or not 0.0 <= value <= 1.0:
        raise ValidationError(f"{name} must be in [0, 1], got {value!r}")


@dataclass(frozen=True)
class ContentItem:
    """A single unit of learning content.

    ``skills`` maps skill ids to relevance weights in [0, 1]; at least one
    weight must be positive. ``prerequisites`` maps skill ids to the mastery
    threshold a learner must hold before the item becomes eligible.
    """

    item_id: str
    skills: dict[str, float]
    difficulty: float
    modality: Modality
    duration_minutes: float
    prerequisites: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.item_id or not isinstance(self.item_id, str):
            raise ValidationError("item_id must be a non-empty string")
        if not self.skills:
            raise ValidationError(f"item {self.item_id!r} must reference at least one skill")
        for skill, weight in self.skills.items():
            _check_unit(weight, f"item {self.item_id!r} weight for skill {skill!r}")
        if not any(w > 0.0 for w in self.skills.values()):
            raise ValidationError(f"item {self.item_id!r} needs at least one positive skill weight")
        _check_unit(self.difficulty, f"item {self.item_id!r} difficulty")
        if not self.duration_minutes > 0.0:
            raise ValidationError(f"item {self.item_id!r} duration_minutes must be positive")
        if not isinstance(self.modality, Modality):
            raise ValidationError(f"item {self.item_id!r} modality must be a Modality")
        for skill, threshold in self.prerequisites.items():
            _check_unit(threshold, f"item {self.item_id!r} prerequisite threshold for {skill!r}")

    @cached_property
    def _taught(self) -> tuple[str, ...]:
        return tuple(sorted(s for s, w in self.skills.items() if w > 0.0))

    def taught_skills(self) -> tuple[str, ...]:
        """Skill ids this item actually teaches (positive weight), sorted."""
        return self._taught

    @cached_property
    def prereq_pairs(self) -> tuple[tuple[str, float], ...]:
        """Prerequisites flattened for hot loops, in definition order."""
        return tuple(self.prerequisites.items())

    @cached_property
    def skills_pairs(self) -> tuple[tuple[str, float], ...]:
        """Skill weights flattened for hot loops, in definition order."""
        return tuple(self.skills.items())

    @cached_property
    def skills_weight_sum(self) -> float:
        total = 0.0
        for _skill, weight in self.skills.items():
            total += weight
        return total


@dataclass(frozen=True)
class Catalog:
    """All available content plus the skill prerequisite graph.

    ``skill_prereqs`` maps every known skill id to the skills it depends on;
    the keys define the skill universe. Construction validates referential
    integrity and that the prerequisite graph is acyclic, raising
    :class:`CatalogError` naming the offending id otherwise.
    """

    skill_prereqs: dict[str, tuple[str, ...]]
    items: dict[str, ContentItem]

    def __post_init__(self) -> None:
        skills = set(self.skill_prereqs)
        for skill, prereqs in self.skill_prereqs.items():
            for dep in prereqs:
                if dep not in skills:
                    raise CatalogError(
                        f"skill {skill!r} lists unknown prerequisite skill {dep!r}"
                    )
        for item_id, item in self.items.items():
            if item_id != item.item_id:
                raise CatalogError(f"item key {item_id!r} does not match item id {item.item_id!r}")
            for skill in item.skills:
                if skill not in skills:
                    raise CatalogError(f"item {item_id!r} references unknown skill {skill!r}")
            for skill in item.prerequisites:
                if skill not in skills:
                    raise CatalogError(
                        f"item {item_id!r} has prerequisite on unknown skill {skill!r}"
                    )
        self._check_acyclic()

    def _check_acyclic(self) -> None:
        WHITE, GRAY, BLACK = 0, 1, 2
        color = {s: WHITE for s in self.skill_prereqs}
        for root in sorted(self.skill_prereqs):
            if color[root] != WHITE:
                continue
            stack: list[tuple[str, int]] = [(root, 0)]
            color[root] = GRAY
            while stack:
                node, idx = stack[-1]
                deps = self.skill_prereqs[node]
                if idx < len(deps):
                    stack[-1] = (node, idx + 1)
                    dep = deps[idx]
                    if color[dep] == GRAY:
                        raise CatalogError(f"skill prerequisite cycle through {dep!r}")
                    if color[dep] == WHITE:
                        color[dep] = GRAY
                        stack.append((dep, 0))
                else:
                    color[node] = BLACK
                    stack.pop()

    @cached_property
    def skill_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.skill_prereqs))

    @cached_property
    def skill_rank(self) -> dict[str, int]:
        """Longest prerequisite chain below each skill (0 for foundation skills)."""
        rank: dict[str, int] = {}

        def resolve(skill: str) -> int:
            if skill in rank:
                return rank[skill]
            deps = self.skill_prereqs[skill]
            value = 0 if not deps else 1 + max(resolve(d) for d in deps)
            rank[skill] = value
            return value

        for skill in self.skill_prereqs:
            resolve(skill)
        return rank

    @cached_property
    def transitive_prereqs(self) -> dict[str, frozenset[str]]:
        """Every skill mapped to the full closure of skills beneath it."""
        closure: dict[str, frozenset[str]] = {}
        for skill in sorted(self.skill_prereqs, key=self.skill_rank.__getitem__):
            deps = self.skill_prereqs[skill]
            acc: set[str] = set(deps)
            for dep in deps:
                acc |= closure[dep]
            closure[skill] = frozenset(acc)
        return closure

    @cached_property
    def items_for_skill(self) -> dict[str, tuple[str, ...]]:
        """Skill id to ids of items teaching it (positive weight), sorted."""
        index: dict[str, list[str]] = {s: [] for s in self.skill_prereqs}
        for item_id in sorted(self.items):
            for skill in self.items[item_id].taught_skills():
                index[skill].append(item_id)
        return {s: tuple(ids) for s, ids in index.items()}

    def quiz_items_for_skill(self, skill: str) -> tuple[str, ...]:
        return tuple(
            i for i in self.items_for_skill[skill] if self.items[i].modality is Modality.QUIZ
        )


@dataclass(frozen=True)
class AssessmentResult:
    """Outcome of one scored (quiz) interaction."""

    item_id: str
    skills_assessed: dict[str, float]
    score: float
    response_time_s: float
    timestamp: int

    def __post_init__(self) -> None:
        if not self.item_id:
            raise ValidationError("assessment item_id must be non-empty")
        if not self.skills_assessed:
            raise ValidationError(f"assessment for {self.item_id!r} must cover at least one skill")
        for skill, weight in self.skills_assessed.items():
            _check_unit(weight, f"assessment weight for skill {skill!r}")
        _check_unit(self.score, f"assessment score for {self.item_id!r}")
        if not self.response_time_s > 0.0:
            raise ValidationError("response_time_s must be positive")


@dataclass(frozen=True)
class InteractionRecord:
    """One history entry: the learner consumed an item at a given tick.

    ``engagement_observed`` is absent when no engagement signal was captured
    (for example items served automatically by the session service).
    ``assessment`` is present only for scored quiz interactions.
    """

    item_id: str
    timestamp: int
    engagement_observed: float | None = None
    assessment: AssessmentResult | None = None

    def __post_init__(self) -> None:
        if self.engagement_observed is not None:
            _check_unit(self.engagement_observed, "engagement_observed")
        if self.assessment is not None:
            if self.assessment.item_id != self.item_id:
                raise ValidationError(
                    f"interaction item {self.item_id!r} does not match "
                    f"assessment item {self.assessment.item_id!r}"
                )


@dataclass(frozen=True)
class RollingMetrics:
    """Windowed learner signals derived from interaction history.

    The five fields, in declaration order, form the signal vector consumed by
    the analytics layer.
    """

    rolling_accuracy: float
    accuracy_trend: float
    mean_engagement: float
    pace: float
    streak: float

    @classmethod
    def cold_start(cls) -> RollingMetrics:
        return cls(0.5, 0.0, 0.5, 0.0, 0.0)

    def as_signals(self) -> SignalVector:
        return (
            self.rolling_accuracy,
            self.accuracy_trend,
            self.mean_engagement,
            self.pace,
            self.streak,
        )


@dataclass(frozen=True)
class FusionConfig:
    """Rates and window for folding assessments into a profile."""

    mastery_rate: float = 0.3
    engagement_rate: float = 0.2
    window: int = 10

    def __post_init__(self) -> None:
        _check_unit(self.mastery_rate, "mastery_rate")
        _check_unit(self.engagement_rate, "engagement_rate")
        if self.window < 1:
            raise ValidationError("window must be at least 1")


@dataclass(frozen=True)
class LearnerProfile:
    """Everything the engine believes about one learner."""

    learner_id: str
    mastery: dict[str, float]
    preferences: dict[str, float]
    engagement: float = 0.5
    history: tuple[InteractionRecord, ...] = ()
    metrics: RollingMetrics = field(default_factory=RollingMetrics.cold_start)

    @classmethod
    def cold_start(
        cls,
        learner_id: str,
        skills: Iterable[str],
        preferences: Mapping[str, float] | None = None,
    ) -> LearnerProfile:
        """A fresh profile: zero mastery, neutral engagement, empty history."""
        prefs = dict(preferences) if preferences else {m.value: 0.5 for m in Modality}
        return cls(
            learner_id=learner_id,
            mastery={s: 0.0 for s in skills},
            preferences=prefs,
        )

    def last_timestamp(self) -> int | None:
        return self.history[-1].timestamp if self.history else None

    def with_mastery(self, overrides: Mapping[str, float]) -> LearnerProfile:
        merged = dict(self.mastery)
        merged.update(overrides)
        return replace(self, mastery=merged)


def validate_profile(profile: LearnerProfile) -> list[str]:
    """Collect invariant violations as human-readable strings.

    Returns an empty list for a valid profile; never raises.
    """
    problems: list[str] = []
    for skill, value in profile.mastery.items():
        if math.isnan(value) or not 0.0 <= value <= 1.0:
            problems.append(f"mastery for skill {skill!r} out of [0, 1]: {value!r}")
    for modality, value in profile.preferences.items():
        if math.isnan(value) or not 0.0 <= value <= 1.0:
            problems.append(f"preference for {modality!r} out of [0, 1]: {value!r}")
    if math.isnan(profile.engagement) or not 0.0 <= profile.engagement <= 1.0:
        problems.append(f"engagement out of [0, 1]: {profile.engagement!r}")
    previous: int | None = None
    for position, record in enumerate(profile.history):
        if previous is not None and record.timestamp < previous:
            problems.append(
                f"history timestamp decreases at position {position}: "
                f"{record.timestamp} after {previous}"
            )
        previous = record.timestamp
    metrics = profile.metrics
    for name in ("rolling_accuracy", "mean_engagement", "pace", "streak"):
        value = getattr(metrics, name)
        if math.isnan(value) or not 0.0 <= value <= 1.0:
            problems.append(f"metric {name} out of [0, 1]: {value!r}")
    if math.isnan(metrics.accuracy_trend) or not -1.0 <= metrics.accuracy_trend <= 1.0:
        problems.append(f"metric accuracy_trend out of [-1, 1]: {metrics.accuracy_trend!r}")
    return problems
