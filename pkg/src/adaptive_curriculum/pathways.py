"""Reward-maximizing pathway selection over curriculum content.

A pathway is a short ordered sequence of items. Candidates come from a beam
search over the curriculum's item pools; the winner maximizes

    reward = engagement_weight * E + quality_weight * Q

where E estimates how engaging the sequence will be (difficulty fit, modality
preference, novelty) and Q how well it advances unmastered curriculum targets
under a projected-mastery walk. The beam accumulates exactly the same
floating-point expressions the public scoring ops evaluate, so its internal
ranking agrees with :func:`reward` to the last bit.

Engagement sums use ``math.fsum`` rather than running accumulation: the
correctly rounded sum is identical for every ordering of the same items, so
sequences that are mathematically tied (permutations of one set) score
bit-identically and the lexicographic tie-break decides them the same way
under any positive rescaling of the weights. Left-to-right accumulation
breaks that: it can put one permutation an ulp above its twin, and which twin
lands on top shifts with the weight magnitudes.
"""

from __future__ import annotations

import heapq
import math
from collections import Counter
from dataclasses import dataclass

from .curriculum import LearnerContext
from .errors import DomainError, ValidationError
from .model import Catalog, ContentItem, LearnerProfile

__all__ = [
    "RewardConfig",
    "Pathway",
    "ScoredPathway",
    "difficulty_fit",
    "estimate_engagement",
    "pathway_quality",
    "reward",
    "enumerate_candidates",
    "select_optimal",
    "recommend",
]

#: Mixing weights of the per-item engagement estimate.
FIT_WEIGHT = 0.5
PREFERENCE_WEIGHT = 0.3
NOVELTY_WEIGHT = 0.2

#: Each prior appearance of an item in the history halves its novelty.
NOVELTY_DECAY = 0.5

#: Preference assumed for a modality the profile says nothing about.
NEUTRAL_PREFERENCE = 0.5


@dataclass(frozen=True)
class RewardConfig:
    """Weights and search geometry for pathway selection."""

    engagement_weight: float = 0.6
    quality_weight: float = 0.4
    horizon: int = 3
    beam_width: int = 8
    stretch: float = 0.10
    fit_width: float = 0.15
    projected_gain: float = 0.2

    def __post_init__(self) -> None:
        if self.engagement_weight < 0.0 or self.quality_weight < 0.0:
            raise ValidationError("reward weights must be non-negative")
        if self.engagement_weight + self.quality_weight <= 0.0:
            raise ValidationError("at least one reward weight must be positive")
        if self.horizon < 1:
            raise ValidationError("horizon must be at least 1")
        if self.beam_width < 1:
            raise ValidationError("beam_width must be at least 1")
        if not self.fit_width > 0.0:
            raise ValidationError("fit_width must be positive")
        if not 0.0 <= self.projected_gain <= 1.0:
            raise ValidationError("projected_gain must be in [0, 1]")


@dataclass(frozen=True)
class Pathway:
    """An ordered, duplicate-free sequence of item ids."""

    items: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(set(self.items)) != len(self.items):
            raise ValidationError(f"pathway repeats an item: {self.items!r}")


@dataclass(frozen=True)
class ScoredPathway:
    pathway: Pathway
    engagement: float
    quality: float
    reward: float


def difficulty_fit(difficulty: float, mastery: float, config: RewardConfig = RewardConfig()) -> float:
    """Gaussian kernel peaking where difficulty sits ``stretch`` above mastery.

    Returns 1.0 at the peak and decays with width ``fit_width``; always in
    (0, 1].
    """
    gap = difficulty - (mastery + config.stretch)
    return math.exp(-(gap * gap) / (2.0 * config.fit_width * config.fit_width))


def _weighted_mastery(item: ContentItem, overrides: dict[str, float], base: dict[str, float]) -> float:
    """Skill-weight-averaged mastery for an item, preferring projected values."""
    total = 0.0
    for skill, weight in item.skills_pairs:
        value = overrides.get(skill)
        if value is None:
            value = base.get(skill, 0.0)
        total += weight * value
    return total / item.skills_weight_sum


def _prereqs_met(item: ContentItem, overrides: dict[str, float], base: dict[str, float]) -> bool:
    for skill, threshold in item.prereq_pairs:
        value = overrides.get(skill)
        if value is None:
            value = base.get(skill, 0.0)
        if value < threshold:
            return False
    return True


def _apply_projection(
    item: ContentItem,
    overrides: dict[str, float],
    base: dict[str, float],
    config: RewardConfig,
) -> None:
    """Advance projected mastery as if the learner consumed ``item``."""
    fit = difficulty_fit(item.difficulty, _weighted_mastery(item, overrides, base), config)
    for skill, weight in item.skills_pairs:
        if weight <= 0.0:
            continue
        current = overrides.get(skill)
        if current is None:
            current = base.get(skill, 0.0)
        overrides[skill] = min(1.0, current + config.projected_gain * fit * (1.0 - current))


_NO_OVERRIDES: dict[str, float] = {}


def _engagement_term(
    item: ContentItem,
    mastery: dict[str, float],
    preferences: dict[str, float],
    appearances: int,
    config: RewardConfig,
) -> float:
    fit = difficulty_fit(item.difficulty, _weighted_mastery(item, _NO_OVERRIDES, mastery), config)
    preference = preferences.get(item.modality.value, NEUTRAL_PREFERENCE)
    novelty = NOVELTY_DECAY**appearances
    return FIT_WEIGHT * fit + PREFERENCE_WEIGHT * preference + NOVELTY_WEIGHT * novelty


def _resolve_items(pathway: Pathway, catalog: Catalog) -> list[ContentItem]:
    resolved = []
    for item_id in pathway.items:
        item = catalog.items.get(item_id)
        if item is None:
            raise ValidationError(f"pathway references unknown item {item_id!r}")
        resolved.append(item)
    return resolved


def estimate_engagement(
    pathway: Pathway,
    profile: LearnerProfile,
    catalog: Catalog,
    config: RewardConfig = RewardConfig(),
) -> float:
    """Mean per-item engagement estimate; rejects empty pathways.

    The mean is order-independent bit for bit (``fsum``), so reorderings of
    the same items always estimate identically.
    """
    items = _resolve_items(pathway, catalog)
    if not items:
        raise DomainError("cannot estimate engagement for an empty pathway")
    counts = Counter(record.item_id for record in profile.history)
    terms = [
        _engagement_term(item, profile.mastery, profile.preferences, counts.get(item.item_id, 0), config)
        for item in items
    ]
    return math.fsum(terms) / len(terms)


def _unmastered_targets(context: LearnerContext) -> list[str]:
    mastery = context.profile.mastery
    return [
        unit.target_skill
        for unit in context.curriculum.units
        if mastery.get(unit.target_skill, 0.0) < unit.mastery_threshold
    ]


def pathway_quality(
    pathway: Pathway,
    context: LearnerContext,
    catalog: Catalog,
    config: RewardConfig = RewardConfig(),
) -> float:
    """Prerequisite soundness times coverage of unmastered curriculum targets.

    Walks the pathway with projected mastery: each item checks its
    prerequisites against the projection, then adds a fit-scaled gain to its
    skills. Coverage counts distinct unmastered targets touched, normalized
    by the most the horizon could touch, and is clamped because one item may
    touch several targets. Empty pathways score 0.
    """
    items = _resolve_items(pathway, catalog)
    if not items:
        return 0.0
    targets = set(_unmastered_targets(context))
    base = context.profile.mastery
    overrides: dict[str, float] = {}
    satisfied = 0
    touched: set[str] = set()
    for item in items:
        if _prereqs_met(item, overrides, base):
            satisfied += 1
        touched.update(s for s in item.taught_skills() if s in targets)
        _apply_projection(item, overrides, base, config)
    denominator = min(config.horizon, len(targets))
    coverage = 1.0 if denominator == 0 else min(1.0, len(touched) / denominator)
    return (satisfied / len(items)) * coverage


def reward(
    pathway: Pathway,
    context: LearnerContext,
    catalog: Catalog,
    config: RewardConfig = RewardConfig(),
) -> ScoredPathway:
    """Score one pathway: reward = engagement_weight * E + quality_weight * Q."""
    engagement = estimate_engagement(pathway, context.profile, catalog, config)
    quality = pathway_quality(pathway, context, catalog, config)
    return ScoredPathway(
        pathway=pathway,
        engagement=engagement,
        quality=quality,
        reward=config.engagement_weight * engagement + config.quality_weight * quality,
    )


def _search(
    context: LearnerContext,
    catalog: Catalog,
    config: RewardConfig,
) -> list[tuple[float, tuple[str, ...], float, int]]:
    """Beam search returning ``(score, items, engagement_sum, covered_mask)``.

    Completed beams (length ``horizon``, or no eligible extension) are kept,
    pruned to ``beam_width`` best by score then lexicographic items. Scores
    are exact: for sequences built from eligible extensions the prerequisite
    fraction is 1, so score reduces to the same expression :func:`reward`
    computes. Each row carries its per-item engagement terms and sums them
    with ``fsum`` at every extension, keeping permutation ties bit-exact (see
    module docstring).
    """
    units = context.curriculum.units
    if not units:
        return []
    profile = context.profile
    base_mastery = profile.mastery
    base_get = base_mastery.get

    pool_ids: set[str] = set()
    for unit in units:
        pool_ids.update(unit.item_pool)
    counts = Counter(record.item_id for record in profile.history)

    targets = _unmastered_targets(context)
    target_bit = {skill: 1 << position for position, skill in enumerate(targets)}
    denominator = min(config.horizon, len(targets))

    # Everything per-item is hoisted out of the search: the engagement term is
    # static for a given profile, and eligibility reduces to the prerequisite
    # bars the base mastery does not already clear ("needs"). Projection only
    # ever raises mastery, so an item with no needs stays eligible under any
    # override set, and an item with needs passes exactly when every needed
    # skill has been projected past its bar.
    candidates: list[tuple[str, ContentItem, float, int, tuple[tuple[str, float], ...]]] = []
    for item_id in sorted(pool_ids):
        item = catalog.items[item_id]
        term = _engagement_term(
            item, base_mastery, profile.preferences, counts.get(item_id, 0), config
        )
        mask = 0
        for skill in item.taught_skills():
            mask |= target_bit.get(skill, 0)
        needs = tuple(
            (skill, bar) for skill, bar in item.prereq_pairs if base_get(skill, 0.0) < bar
        )
        candidates.append((item_id, item, term, mask, needs))
    # Descending engagement term enables bound pruning below; result order is
    # unaffected because extensions are fully re-sorted by (-score, items).
    candidates.sort(key=lambda entry: -entry[2])

    engagement_weight = config.engagement_weight
    quality_weight = config.quality_weight
    coverage_by_mask: dict[int, float] = {
        0: 1.0 if denominator == 0 else 0.0
    }

    fsum = math.fsum
    # state: (items, engagement terms, fsum of terms, projected-mastery
    # overrides, covered mask, score)
    beams: list[tuple[tuple[str, ...], tuple[float, ...], float, dict[str, float], int, float]] = [
        ((), (), 0.0, {}, 0, 0.0)
    ]
    completed: list[tuple[float, tuple[str, ...], float, int]] = []

    beam_width = config.beam_width
    for _depth in range(config.horizon):
        # extension rows sort as plain tuples: (-score, items) is a unique key
        # because every row's item sequence is distinct, so the trailing
        # payload (dicts included) is never compared.
        extensions: list[
            tuple[float, tuple[str, ...], tuple[float, ...], float, dict[str, float], int, ContentItem]
        ] = []
        push = extensions.append
        # Top extension scores seen at this depth (min-heap). A candidate whose
        # optimistic score (full coverage, terms descending) falls strictly
        # below the k-th best cannot survive pruning, so the rest of the scan
        # is skipped once the beam is known not to be a dead end. The bound
        # shares the extension's own fsum, so a bound that ties a kept score
        # ties it at every weight scale and never prunes on a tie.
        kept: list[float] = []
        length = _depth + 1
        # Depth-level viability: a candidate whose needed bar exceeds the best
        # projection held by ANY beam is ineligible for all of them, so the
        # per-beam scan never has to see it.
        best_projection: dict[str, float] = {}
        for _items, _terms, _esum, beam_overrides, _cov, _score in beams:
            for skill, value in beam_overrides.items():
                if value > best_projection.get(skill, 0.0):
                    best_projection[skill] = value
        viable = [
            entry
            for entry in candidates
            if all(best_projection.get(skill, 0.0) >= bar for skill, bar in entry[4])
        ]
        for items_so_far, terms_so_far, engagement_sum, overrides, covered, score in beams:
            extended = False
            override_get = overrides.get
            for item_id, item, term, mask, needs in viable:
                if item_id in items_so_far:
                    continue
                for skill, bar in needs:
                    value = override_get(skill)
                    if value is None or value < bar:
                        break
                else:
                    new_terms = terms_so_far + (term,)
                    new_sum = fsum(new_terms)
                    if extended and len(kept) == beam_width:
                        optimistic = engagement_weight * (new_sum / length) + quality_weight
                        if optimistic < kept[0]:
                            break
                    extended = True
                    new_covered = covered | mask
                    coverage = coverage_by_mask.get(new_covered)
                    if coverage is None:
                        coverage = min(1.0, _bit_count(new_covered) / denominator)
                        coverage_by_mask[new_covered] = coverage
                    new_score = engagement_weight * (new_sum / length) + quality_weight * (
                        1.0 * coverage
                    )
                    if len(kept) < beam_width:
                        heapq.heappush(kept, new_score)
                    elif new_score > kept[0]:
                        heapq.heapreplace(kept, new_score)
                    push(
                        (
                            -new_score,
                            items_so_far + (item_id,),
                            new_terms,
                            new_sum,
                            overrides,
                            new_covered,
                            item,
                        )
                    )
            if not extended and items_so_far:
                completed.append((score, items_so_far, engagement_sum, covered))
        if not extensions:
            break
        extensions.sort()
        survivors = extensions[:beam_width]
        beams = []
        for neg_score, items_tuple, new_terms, new_sum, parent_overrides, new_covered, item in survivors:
            overrides = dict(parent_overrides)
            _apply_projection(item, overrides, base_mastery, config)
            beams.append((items_tuple, new_terms, new_sum, overrides, new_covered, -neg_score))
    else:
        completed.extend(
            (score, items_tuple, engagement_sum, covered)
            for items_tuple, _terms, engagement_sum, _overrides, covered, score in beams
        )

    completed.sort(key=lambda entry: (-entry[0], entry[1]))
    return completed[: config.beam_width]


def _bit_count(value: int) -> int:
    return value.bit_count()


def enumerate_candidates(
    context: LearnerContext,
    catalog: Catalog,
    config: RewardConfig = RewardConfig(),
) -> list[Pathway]:
    """Candidate pathways from beam search over the curriculum's item pools.

    Every candidate extends only with items whose prerequisites hold under
    projected mastery; a beam completes at the horizon length or when nothing
    eligible remains. Returns at most ``beam_width`` pathways, best first,
    deterministically ordered. An empty curriculum (or no eligible item at
    all) yields an empty list.
    """
    return [Pathway(items) for _score, items, _esum, _covered in _search(context, catalog, config)]


def select_optimal(
    candidates: list[Pathway],
    context: LearnerContext,
    catalog: Catalog,
    config: RewardConfig = RewardConfig(),
) -> ScoredPathway:
    """Argmax of :func:`reward` over candidates; ties pick the lexicographically
    smallest item sequence. Raises :class:`DomainError` when there is nothing
    to choose from."""
    if not candidates:
        raise DomainError("no candidate pathways to select from")
    scored = [reward(candidate, context, catalog, config) for candidate in candidates]
    return min(scored, key=lambda sp: (-sp.reward, sp.pathway.items))


def recommend(
    context: LearnerContext,
    catalog: Catalog,
    config: RewardConfig = RewardConfig(),
) -> ScoredPathway:
    """Enumerate and select in one step, reusing the beam's exact scores.

    Equivalent to ``select_optimal(enumerate_candidates(...), ...)`` but
    avoids rescoring every candidate from scratch.
    """
    results = _search(context, catalog, config)
    if not results:
        raise DomainError("no candidate pathways to select from")
    score, items, engagement_sum, covered = results[0]
    targets = _unmastered_targets(context)
    denominator = min(config.horizon, len(targets))
    coverage = 1.0 if denominator == 0 else min(1.0, _bit_count(covered) / denominator)
    return ScoredPathway(
        pathway=Pathway(items),
        engagement=engagement_sum / len(items),
        quality=1.0 * coverage,
        reward=score,
    )
