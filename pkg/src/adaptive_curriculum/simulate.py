"""Seeded cohort simulation that drives the engine end to end.

Simulated students are simple but opinionated learners:

- latent per-skill ability starts uniform in [0.05, 0.35]
- learning rate is uniform in [0.1, 0.3]; consuming an item raises each taught
  skill by ``rate * fit * (1 - ability)``, where fit compares the item's
  difficulty to the skill's latent ability
- each student has one preferred modality with affinity in [0.8, 1.0]; the
  others sit in [0.1, 0.4], so serving against type costs real engagement
- quiz responses are correct with probability
  ``guess + (1 - guess) * sigmoid(4 * (ability - difficulty))``, guess floor 0.1
- response time is log-normal around a 20 second median
- observed engagement is ``0.6 * fit + 0.4 * affinity`` plus N(0, 0.05) noise,
  clamped to [0, 1]; when fit drops below the frustration threshold (item too
  hard) or boredom threshold (too easy), engagement collapses to 0.05

Every random draw comes from a per-student substream derived from
``(seed, student index, purpose)``, so runs are reproducible item for item
and students are independent of cohort size.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
import statistics
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .analytics import (
    AnalyticsState,
    RetentionModel,
    TrainerConfig,
    composite_performance,
    integrate_feedback,
    krr,
    les,
    update_weights,
)
from .curriculum import LearnerContext, generate_curriculum, refresh_curriculum, static_item_order
from .errors import DomainError, ValidationError
from .fusion import fuse_assessment, record_interaction
from .model import AssessmentResult, Catalog, ContentItem, FusionConfig, LearnerProfile, Modality
from .pathways import RewardConfig, difficulty_fit, recommend

__all__ = [
    "AblationStrategy",
    "SimStudent",
    "SimConfig",
    "StudentOutcome",
    "SessionReport",
    "spawn_cohort",
    "respond",
    "learn",
    "engage",
    "run_session",
    "run_ablation_matrix",
    "REPORT_COLUMNS",
    "report_rows",
    "render_table",
    "session_report_document",
    "write_session_report",
    "write_ablation_report",
    "ablation_ranking",
]

ABILITY_LOW, ABILITY_HIGH = 0.05, 0.35
LEARN_RATE_LOW, LEARN_RATE_HIGH = 0.1, 0.3
AFFINITY_PREFERRED_LOW, AFFINITY_PREFERRED_HIGH = 0.8, 1.0
AFFINITY_OTHER_LOW, AFFINITY_OTHER_HIGH = 0.1, 0.4
RESPONSE_SLOPE = 4.0
RESPONSE_TIME_MEDIAN_S = 20.0
RESPONSE_TIME_SIGMA = 0.5
ENGAGEMENT_FIT_WEIGHT = 0.6
ENGAGEMENT_AFFINITY_WEIGHT = 0.4
ENGAGEMENT_NOISE_SD = 0.05
ENGAGEMENT_FLOOR = 0.05
DEFAULT_THRESHOLD = 0.25
DEFAULT_GUESS_FLOOR = 0.1

#: Kernel used for the student's own difficulty fit (same shape the engine uses).
_STUDENT_KERNEL = RewardConfig()

_NEUTRAL_PREFERENCES = {modality.value: 0.5 for modality in Modality}


class AblationStrategy(str, Enum):
    """Serving strategies for the ablation matrix. Values are report labels."""

    FULL_FRAMEWORK = "FullFramework"
    NO_REAL_TIME_ADJUSTMENT = "No Real-Time Adjustment"
    NO_PERSONALIZED_RECOMMENDATIONS = "No Personalized Recommendations"
    FIXED_LEARNING_PATH = "Fixed Learning Path"
    BASIC_ASSESSMENT_ONLY = "Basic Assessment Only"
    STATIC_RESOURCE_ALLOCATION = "Static Resource Allocation"

    @classmethod
    def parse(cls, text: str) -> AblationStrategy:
        """Accept either the label or the member name (case-insensitive)."""
        for member in cls:
            if text == member.value or text.lower() == member.name.lower():
                return member
        normalized = text.replace("-", "").replace("_", "").replace(" ", "").lower()
        for member in cls:
            if normalized == member.value.replace("-", "").replace(" ", "").lower():
                return member
        known = ", ".join(member.value for member in cls)
        raise ValidationError(f"unknown strategy {text!r} (known: {known})")


@dataclass(frozen=True)
class SimStudent:
    """Latent state of one simulated learner."""

    index: int
    ability: dict[str, float]
    learn_rate: float
    modality_affinity: dict[str, float]
    frustration_threshold: float = DEFAULT_THRESHOLD
    boredom_threshold: float = DEFAULT_THRESHOLD
    guess_floor: float = DEFAULT_GUESS_FLOOR


@dataclass(frozen=True)
class SimConfig:
    """Cohort protocol knobs.

    ``reselect_policy`` controls when the engine re-runs pathway selection:
    after every fused assessment (the default closed loop) or only once when
    the session starts.
    """

    seed: int = 0
    cohort_size: int = 200
    episodes: int = 50
    formative_every: int = 5
    strategy: AblationStrategy = AblationStrategy.FULL_FRAMEWORK
    retention_delay: float = 10.0
    objectives: tuple[str, ...] | None = None
    reselect_policy: str = "every_assessment"

    def __post_init__(self) -> None:
        if self.cohort_size < 0:
            raise ValidationError("cohort_size must be non-negative")
        if self.episodes < 0:
            raise ValidationError("episodes must be non-negative")
        if self.formative_every < 1:
            raise ValidationError("formative_every must be at least 1")
        if self.retention_delay < 0.0:
            raise ValidationError("retention_delay must be non-negative")
        if self.reselect_policy not in ("every_assessment", "session_start"):
            raise ValidationError(
                f"reselect_policy must be 'every_assessment' or 'session_start', "
                f"got {self.reselect_policy!r}"
            )


@dataclass(frozen=True)
class StudentOutcome:
    index: int
    les: float
    krr: float


@dataclass(frozen=True)
class SessionReport:
    """Aggregated outcome of one cohort run."""

    strategy: str
    seed: int
    cohort_size: int
    episodes: int
    interactions: int
    mean_les: float
    sd_les: float
    mean_krr: float
    sd_krr: float
    les_values: tuple[float, ...]
    krr_values: tuple[float, ...]
    reselect_policy: str = "every_assessment"


def _substream(seed: int, index: int, purpose: str) -> random.Random:
    digest = hashlib.sha256(f"{seed}|{index}|{purpose}".encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def spawn_cohort(catalog: Catalog, config: SimConfig) -> list[SimStudent]:
    """Draw ``cohort_size`` students from the documented population."""
    students = []
    for index in range(config.cohort_size):
        rng = _substream(config.seed, index, "spawn")
        ability = {skill: rng.uniform(ABILITY_LOW, ABILITY_HIGH) for skill in catalog.skill_ids}
        learn_rate = rng.uniform(LEARN_RATE_LOW, LEARN_RATE_HIGH)
        modalities = [modality.value for modality in Modality]
        preferred = modalities[rng.randrange(len(modalities))]
        affinity = {
            modality: rng.uniform(AFFINITY_PREFERRED_LOW, AFFINITY_PREFERRED_HIGH)
            if modality == preferred
            else rng.uniform(AFFINITY_OTHER_LOW, AFFINITY_OTHER_HIGH)
            for modality in modalities
        }
        students.append(
            SimStudent(
                index=index,
                ability=ability,
                learn_rate=learn_rate,
                modality_affinity=affinity,
            )
        )
    return students


def _latent_fit(student: SimStudent, item: ContentItem, skill: str | None = None) -> float:
    if skill is not None:
        level = student.ability.get(skill, 0.0)
    else:
        level = _weighted_ability(student, item)
    return difficulty_fit(item.difficulty, level, _STUDENT_KERNEL)


def respond(student: SimStudent, item: ContentItem, rng: random.Random, tick: int = 0) -> AssessmentResult:
    """Simulate answering a quiz item; the score is binary."""
    level = _weighted_ability(student, item)
    p_correct = student.guess_floor + (1.0 - student.guess_floor) / (
        1.0 + math.exp(-RESPONSE_SLOPE * (level - item.difficulty))
    )
    score = 1.0 if rng.random() < p_correct else 0.0
    response_time = rng.lognormvariate(math.log(RESPONSE_TIME_MEDIAN_S), RESPONSE_TIME_SIGMA)
    return AssessmentResult(
        item_id=item.item_id,
        skills_assessed=dict(item.skills),
        score=score,
        response_time_s=response_time,
        timestamp=tick,
    )


def learn(student: SimStudent, item: ContentItem) -> SimStudent:
    """Latent ability growth from consuming an item, gated by per-skill fit."""
    ability = dict(student.ability)
    for skill in item.taught_skills():
        current = ability.get(skill, 0.0)
        fit = difficulty_fit(item.difficulty, current, _STUDENT_KERNEL)
        ability[skill] = min(1.0, current + student.learn_rate * fit * (1.0 - current))
    return replace(student, ability=ability)


def engage(student: SimStudent, item: ContentItem, rng: random.Random) -> float:
    """Observed engagement for one interaction.

    The noise draw always happens before the floor check so the random stream
    stays aligned across serving strategies.
    """
    fit = _latent_fit(student, item)
    noise = rng.gauss(0.0, ENGAGEMENT_NOISE_SD)
    level_gap_hard = item.difficulty > _weighted_ability(student, item) + _STUDENT_KERNEL.stretch
    threshold = student.frustration_threshold if level_gap_hard else student.boredom_threshold
    if fit < threshold:
        return ENGAGEMENT_FLOOR
    raw = ENGAGEMENT_FIT_WEIGHT * fit + ENGAGEMENT_AFFINITY_WEIGHT * student.modality_affinity.get(
        item.modality.value, 0.5
    ) + noise
    return 0.0 if raw < 0.0 else 1.0 if raw > 1.0 else raw


def _weighted_ability(student: SimStudent, item: ContentItem) -> float:
    total = 0.0
    ability = student.ability
    for skill, weight in item.skills_pairs:
        total += weight * ability.get(skill, 0.0)
    return total / item.skills_weight_sum


def _beam_queue(
    profile: LearnerProfile,
    curriculum,
    objectives: tuple[str, ...],
    catalog: Catalog,
    reward_config: RewardConfig,
    neutral_preferences: bool,
) -> list[str]:
    if not curriculum.units:
        return []
    selection_profile = (
        replace(profile, preferences=dict(_NEUTRAL_PREFERENCES))
        if neutral_preferences
        else profile
    )
    context = LearnerContext(selection_profile, curriculum, objectives)
    try:
        return list(recommend(context, catalog, reward_config).pathway.items)
    except DomainError:
        return []


def _next_static(
    order: tuple[str, ...],
    position: int,
    mastery: dict[str, float],
    catalog: Catalog,
) -> tuple[str, int]:
    """Next prerequisite-eligible item in the fixed order, cycling.

    Falls back to the raw next item when a full cycle finds nothing eligible;
    an episode always serves something.
    """
    size = len(order)
    for offset in range(size):
        candidate = order[(position + offset) % size]
        item = catalog.items[candidate]
        if all(mastery.get(s, 0.0) >= threshold for s, threshold in item.prerequisites.items()):
            return candidate, (position + offset + 1) % size
    return order[position % size], (position + 1) % size


def _eligible_pool(curriculum, mastery: dict[str, float], catalog: Catalog) -> list[str]:
    seen: set[str] = set()
    for unit in curriculum.units:
        seen.update(unit.item_pool)
    eligible = []
    for item_id in sorted(seen):
        item = catalog.items[item_id]
        if all(mastery.get(s, 0.0) >= threshold for s, threshold in item.prerequisites.items()):
            eligible.append(item_id)
    return eligible


def _formative_item(catalog: Catalog, curriculum, profile: LearnerProfile) -> str | None:
    for unit in curriculum.units:
        quizzes = catalog.quiz_items_for_skill(unit.target_skill)
        if quizzes:
            mastery = profile.mastery.get(unit.target_skill, 0.0)
            return min(
                quizzes,
                key=lambda iid: (abs(catalog.items[iid].difficulty - mastery), iid),
            )
    quizzes = sorted(
        item_id for item_id, item in catalog.items.items() if item.modality is Modality.QUIZ
    )
    return quizzes[0] if quizzes else None


def _run_student(
    catalog: Catalog,
    config: SimConfig,
    student: SimStudent,
    static_order: tuple[str, ...],
    objectives: tuple[str, ...],
    reward_config: RewardConfig,
    fusion_config: FusionConfig,
    trainer_config: TrainerConfig,
) -> StudentOutcome:
    strategy = config.strategy
    rng = _substream(config.seed, student.index, "session")
    profile = LearnerProfile.cold_start(
        f"sim-{student.index}",
        catalog.skill_ids,
        preferences=dict(student.modality_affinity),
    )
    analytics = AnalyticsState()
    curriculum = generate_curriculum(profile, catalog, objectives)

    beam_served = strategy in (
        AblationStrategy.FULL_FRAMEWORK,
        AblationStrategy.NO_REAL_TIME_ADJUSTMENT,
        AblationStrategy.BASIC_ASSESSMENT_ONLY,
        AblationStrategy.STATIC_RESOURCE_ALLOCATION,
    )
    neutral = strategy is AblationStrategy.STATIC_RESOURCE_ALLOCATION
    queue: list[str] = []
    if beam_served:
        queue = _beam_queue(profile, curriculum, objectives, catalog, reward_config, neutral)
    static_position = 0
    frozen = False
    engagements: list[float] = []
    exposures: Counter[str] = Counter()

    for tick in range(1, config.episodes + 1):
        if strategy is AblationStrategy.BASIC_ASSESSMENT_ONLY:
            assess_due = tick == config.episodes
        else:
            assess_due = tick % config.formative_every == 0

        item_id: str | None = None
        if assess_due:
            item_id = _formative_item(catalog, curriculum, profile)
        if item_id is None:
            assess_due = False
            if strategy is AblationStrategy.NO_PERSONALIZED_RECOMMENDATIONS:
                pool = _eligible_pool(curriculum, profile.mastery, catalog)
                if pool:
                    item_id = pool[rng.randrange(len(pool))]
                else:
                    item_id, static_position = _next_static(
                        static_order, static_position, profile.mastery, catalog
                    )
            elif strategy is AblationStrategy.FIXED_LEARNING_PATH:
                item_id, static_position = _next_static(
                    static_order, static_position, profile.mastery, catalog
                )
            else:
                if not queue:
                    if frozen or config.reselect_policy == "session_start":
                        queue = []
                    else:
                        queue = _beam_queue(
                            profile, curriculum, objectives, catalog, reward_config, neutral
                        )
                if queue:
                    item_id = queue.pop(0)
                else:
                    item_id, static_position = _next_static(
                        static_order, static_position, profile.mastery, catalog
                    )
        item = catalog.items[item_id]

        observed = engage(student, item, rng)
        engagements.append(observed)
        for skill in item.taught_skills():
            exposures[skill] += 1
        result = None
        if assess_due and item.modality is Modality.QUIZ:
            result = respond(student, item, rng, tick)
        student = learn(student, item)

        if frozen:
            continue

        if result is not None:
            analytics = update_weights(
                analytics, profile.metrics.as_signals(), result.score, trainer_config
            )
            profile = fuse_assessment(
                profile, result, fusion_config, engagement_observed=observed
            )
        else:
            profile = record_interaction(
                profile, item_id, tick, engagement_observed=observed, config=fusion_config
            )

        estimate = composite_performance(analytics, profile.metrics.as_signals())
        analytics = integrate_feedback(analytics, estimate, trainer_config)

        if result is not None:
            if strategy is not AblationStrategy.FIXED_LEARNING_PATH:
                curriculum = refresh_curriculum(profile, catalog, curriculum, objectives)
            if beam_served and config.reselect_policy == "every_assessment":
                queue = _beam_queue(
                    profile, curriculum, objectives, catalog, reward_config, neutral
                )
            if strategy is AblationStrategy.NO_REAL_TIME_ADJUSTMENT:
                frozen = True

    outcome_mastery = {skill: student.ability.get(skill, 0.0) for skill in objectives}
    student_les = les(engagements)
    student_krr = krr(
        outcome_mastery,
        dict(exposures),
        RetentionModel(delay=config.retention_delay),
    )
    return StudentOutcome(student.index, student_les, student_krr)


def run_session(
    catalog: Catalog,
    config: SimConfig,
    reward_config: RewardConfig | None = None,
    fusion_config: FusionConfig | None = None,
    trainer_config: TrainerConfig | None = None,
) -> SessionReport:
    """Run one cohort under one strategy and aggregate LES/KRR.

    Deterministic for a given (catalog, config, engine configs): every student
    owns a seed-derived substream, and aggregation order is fixed by student
    index. Total interactions always equal ``cohort_size * episodes``.
    """
    if config.cohort_size < 1:
        raise ValidationError("run_session needs cohort_size >= 1")
    if config.episodes < 1:
        raise ValidationError("run_session needs episodes >= 1")
    if not catalog.items:
        raise ValidationError("run_session needs a catalog with at least one item")
    reward_config = reward_config or RewardConfig()
    fusion_config = fusion_config or FusionConfig()
    trainer_config = trainer_config or TrainerConfig()
    objectives = config.objectives if config.objectives is not None else catalog.skill_ids
    for skill in objectives:
        if skill not in catalog.skill_prereqs:
            raise ValidationError(f"unknown objective skill {skill!r}")

    static_order = static_item_order(catalog)
    outcomes = [
        _run_student(
            catalog,
            config,
            student,
            static_order,
            tuple(objectives),
            reward_config,
            fusion_config,
            trainer_config,
        )
        for student in spawn_cohort(catalog, config)
    ]
    les_values = tuple(outcome.les for outcome in outcomes)
    krr_values = tuple(outcome.krr for outcome in outcomes)
    return SessionReport(
        strategy=config.strategy.value,
        seed=config.seed,
        cohort_size=config.cohort_size,
        episodes=config.episodes,
        interactions=config.cohort_size * config.episodes,
        mean_les=statistics.fmean(les_values),
        sd_les=statistics.pstdev(les_values),
        mean_krr=statistics.fmean(krr_values),
        sd_krr=statistics.pstdev(krr_values),
        les_values=les_values,
        krr_values=krr_values,
        reselect_policy=config.reselect_policy,
    )


def _matrix_task(
    args: tuple[Catalog, SimConfig, RewardConfig, FusionConfig, TrainerConfig],
) -> SessionReport:
    catalog, config, reward_config, fusion_config, trainer_config = args
    return run_session(catalog, config, reward_config, fusion_config, trainer_config)


def run_ablation_matrix(
    catalog: Catalog,
    base_config: SimConfig,
    seeds: Sequence[int],
    reward_config: RewardConfig | None = None,
    fusion_config: FusionConfig | None = None,
    trainer_config: TrainerConfig | None = None,
    workers: int = 1,
) -> list[SessionReport]:
    """Every strategy on every seed, seed-major, strategies in enum order.

    ``workers > 1`` fans runs out to processes; each run is independent and
    seeded, so the collected result list is identical either way.
    """
    reward_config = reward_config or RewardConfig()
    fusion_config = fusion_config or FusionConfig()
    trainer_config = trainer_config or TrainerConfig()
    tasks = [
        (
            catalog,
            replace(base_config, seed=seed, strategy=strategy),
            reward_config,
            fusion_config,
            trainer_config,
        )
        for seed in seeds
        for strategy in AblationStrategy
    ]
    if workers <= 1:
        return [_matrix_task(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_matrix_task, tasks))


REPORT_COLUMNS = ("strategy", "seed", "mean_les", "sd_les", "mean_krr", "sd_krr", "interactions")


def report_rows(reports: Iterable[SessionReport]) -> list[tuple[str, ...]]:
    rows = []
    for report in reports:
        rows.append(
            (
                report.strategy,
                str(report.seed),
                repr(report.mean_les),
                repr(report.sd_les),
                repr(report.mean_krr),
                repr(report.sd_krr),
                str(report.interactions),
            )
        )
    return rows


def render_table(reports: Iterable[SessionReport]) -> str:
    """Flat tab-separated table, one row per (strategy, seed) run."""
    lines = ["\t".join(REPORT_COLUMNS)]
    for row in report_rows(reports):
        lines.append("\t".join(row))
    return "\n".join(lines) + "\n"


def session_report_document(report: SessionReport) -> dict:
    """Structured (JSON-ready) form of one run's report."""
    return {
        "kind": "session-report",
        "strategy": report.strategy,
        "seed": report.seed,
        "protocol": {
            "cohort_size": report.cohort_size,
            "episodes": report.episodes,
            "interactions": report.interactions,
            "reselect_policy": report.reselect_policy,
        },
        "aggregates": {
            "mean_les": report.mean_les,
            "sd_les": report.sd_les,
            "mean_krr": report.mean_krr,
            "sd_krr": report.sd_krr,
        },
        "per_student": {
            "les": list(report.les_values),
            "krr": list(report.krr_values),
        },
    }


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    tmp.replace(path)


def write_session_report(report: SessionReport, out_dir: str | Path, stem: str = "session") -> dict[str, Path]:
    """Write both report forms (structured JSON and flat table). Atomic and
    idempotent: rerunning a byte-identical report leaves identical files."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    json_path = out / f"{stem}.json"
    table_path = out / f"{stem}.tsv"
    _atomic_write(
        json_path, json.dumps(session_report_document(report), indent=2, sort_keys=True) + "\n"
    )
    _atomic_write(table_path, render_table([report]))
    return {"doc": json_path, "table": table_path}


def ablation_ranking(reports: Sequence[SessionReport]) -> dict:
    """Seed-averaged scores per strategy plus deltas against the full loop."""
    by_strategy: dict[str, list[SessionReport]] = {}
    for report in reports:
        by_strategy.setdefault(report.strategy, []).append(report)
    summary = {}
    for strategy, runs in by_strategy.items():
        summary[strategy] = {
            "mean_les": statistics.fmean(r.mean_les for r in runs),
            "mean_krr": statistics.fmean(r.mean_krr for r in runs),
            "seeds": sorted(r.seed for r in runs),
        }
    full = summary.get(AblationStrategy.FULL_FRAMEWORK.value)
    if full is not None:
        for strategy, entry in summary.items():
            entry["les_delta_vs_full"] = entry["mean_les"] - full["mean_les"]
            entry["krr_delta_vs_full"] = entry["mean_krr"] - full["mean_krr"]
    ranked = sorted(summary, key=lambda s: -summary[s]["mean_les"])
    return {"strategies": summary, "ranked_by_les": ranked}


def write_ablation_report(reports: Sequence[SessionReport], out_dir: str | Path) -> dict[str, Path]:
    """Write the ablation matrix: flat table, per-run documents, and ranking."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    table_path = out / "ablation.tsv"
    json_path = out / "ablation.json"
    document = {
        "kind": "ablation-report",
        "runs": [session_report_document(report) for report in reports],
        "ranking": ablation_ranking(reports),
    }
    _atomic_write(json_path, json.dumps(document, indent=2, sort_keys=True) + "\n")
    _atomic_write(table_path, render_table(reports))
    return {"doc": json_path, "table": table_path}
