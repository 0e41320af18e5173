"""Curriculum generation: which skills to study next and with what content."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable

from .errors import ValidationError
from .model import Catalog, LearnerProfile

__all__ = [
    "DEFAULT_MASTERY_THRESHOLD",
    "CurriculumUnit",
    "Curriculum",
    "LearnerContext",
    "generate_curriculum",
    "refresh_curriculum",
    "static_item_order",
]

DEFAULT_MASTERY_THRESHOLD = 0.8


@dataclass(frozen=True)
class CurriculumUnit:
    """One skill to bring up to its mastery threshold, with candidate content.

    ``item_pool`` is never empty and is ordered by closeness of item
    difficulty to the learner's mastery at generation time, ties broken by id.
    """

    target_skill: str
    item_pool: tuple[str, ...]
    mastery_threshold: float

    def __post_init__(self) -> None:
        if not self.item_pool:
            raise ValidationError(f"unit for {self.target_skill!r} has an empty item pool")
        if not 0.0 < self.mastery_threshold <= 1.0:
            raise ValidationError("mastery_threshold must be in (0, 1]")


@dataclass(frozen=True)
class Curriculum:
    """An ordered sequence of units, prerequisites always before dependents."""

    units: tuple[CurriculumUnit, ...]
    generated_at: int = 0

    def targets(self) -> tuple[str, ...]:
        return tuple(unit.target_skill for unit in self.units)


@dataclass(frozen=True)
class LearnerContext:
    """Bundle of what pathway scoring needs to know about one learner."""

    profile: LearnerProfile
    curriculum: Curriculum
    objectives: tuple[str, ...] = ()


def generate_curriculum(
    profile: LearnerProfile,
    catalog: Catalog,
    objectives: Iterable[str],
    threshold: float = DEFAULT_MASTERY_THRESHOLD,
    generated_at: int = 0,
) -> Curriculum:
    """Build a fresh curriculum for the given objective skills.

    Selects every objective and transitive prerequisite skill whose mastery
    sits below ``threshold``, orders them topologically (prerequisite depth
    within the selected set, ties by skill id), and attaches each skill's
    covering items sorted by difficulty closeness. Skills no catalog item
    teaches are skipped: a unit without content would be unusable.
    """
    objective_list = list(objectives)
    for skill in objective_list:
        if skill not in catalog.skill_prereqs:
            raise ValidationError(f"unknown objective skill {skill!r}")

    needed: set[str] = set()
    for skill in objective_list:
        needed.add(skill)
        needed |= catalog.transitive_prereqs[skill]

    selected = {
        skill
        for skill in needed
        if profile.mastery.get(skill, 0.0) < threshold and catalog.items_for_skill[skill]
    }

    rank: dict[str, int] = {}
    for skill in sorted(selected, key=catalog.skill_rank.__getitem__):
        parents = [p for p in catalog.skill_prereqs[skill] if p in selected]
        rank[skill] = 0 if not parents else 1 + max(rank[p] for p in parents)

    units = []
    for skill in sorted(selected, key=lambda s: (rank[s], s)):
        mastery = profile.mastery.get(skill, 0.0)
        pool = sorted(
            catalog.items_for_skill[skill],
            key=lambda iid: (abs(catalog.items[iid].difficulty - mastery), iid),
        )
        units.append(CurriculumUnit(skill, tuple(pool), threshold))
    return Curriculum(tuple(units), generated_at)


def refresh_curriculum(
    profile: LearnerProfile,
    catalog: Catalog,
    current: Curriculum,
    objectives: Iterable[str],
    threshold: float = DEFAULT_MASTERY_THRESHOLD,
    generated_at: int | None = None,
) -> Curriculum:
    """Regenerate after a profile change, keeping the active unit stable.

    The first unit of ``current`` keeps its front position as long as its
    target is still below threshold, unless one of its own prerequisite
    skills re-entered the curriculum; then prerequisite order wins, since a
    curriculum that schedules a skill before its prerequisites is unsound.
    """
    if generated_at is None:
        generated_at = current.generated_at + 1
    fresh = generate_curriculum(profile, catalog, objectives, threshold, generated_at)
    if not current.units:
        return fresh
    active = current.units[0].target_skill
    targets = fresh.targets()
    if active not in targets:
        return fresh
    blockers = catalog.transitive_prereqs[active] & set(targets)
    if blockers:
        return fresh
    reordered = [unit for unit in fresh.units if unit.target_skill == active]
    reordered += [unit for unit in fresh.units if unit.target_skill != active]
    return replace(fresh, units=tuple(reordered))


def static_item_order(catalog: Catalog) -> tuple[str, ...]:
    """All items in a fixed prerequisite-respecting order.

    Sorted by the deepest skill each item teaches, then difficulty, then id.
    Used by serving policies that never adapt (fixed-path delivery and
    fallbacks when no pathway is available).
    """
    def key(item_id: str) -> tuple[int, float, str]:
        item = catalog.items[item_id]
        depth = max(catalog.skill_rank[s] for s in item.taught_skills())
        return (depth, item.difficulty, item_id)

    return tuple(sorted(catalog.items, key=key))
