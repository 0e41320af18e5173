"""Folding interactions and assessment outcomes into a learner profile.

All operations are pure: they take a profile value and return a new one.
Mastery and engagement follow exponential moving averages written in delta
form (``m + rate * (target - m)``) so that a target equal to the current
value is an exact fixed point.
"""

from __future__ import annotations

from dataclasses import replace

from .errors import OrderingError
from .model import (
    AssessmentResult,
    FusionConfig,
    InteractionRecord,
    LearnerProfile,
    RollingMetrics,
    SignalVector,
)

__all__ = ["fuse_assessment", "record_interaction", "compute_signals", "windowed_metrics"]

#: Assessments scoring at or above this count toward the streak signal.
PASS_SCORE = 0.5


def _clamp(value: float) -> float:
    return 0.0 if value < 0.0 else 1.0 if value > 1.0 else value


def windowed_metrics(history: tuple[InteractionRecord, ...], window: int) -> RollingMetrics:
    """Recompute rolling signals over the last ``window`` entries of a history.

    Cold-start defaults apply to any signal whose inputs are absent: accuracy
    and engagement fall back to the uninformative 0.5, trend, pace, and streak
    to 0.
    """
    scores = [r.assessment.score for r in history if r.assessment is not None]
    recent = scores[-window:]
    rolling_accuracy = sum(recent) / len(recent) if recent else 0.5
    prior = scores[-2 * window : -window]
    accuracy_trend = rolling_accuracy - sum(prior) / len(prior) if prior else 0.0

    observed = [
        r.engagement_observed for r in history[-window:] if r.engagement_observed is not None
    ]
    mean_engagement = sum(observed) / len(observed) if observed else 0.5

    if history:
        horizon = history[-1].timestamp - window
        count = 0
        for record in reversed(history):
            if record.timestamp <= horizon or count >= window:
                break
            count += 1
        pace = count / window
    else:
        pace = 0.0

    run = 0
    seen = 0
    for record in reversed(history):
        if record.assessment is None:
            continue
        seen += 1
        if record.assessment.score < PASS_SCORE:
            break
        run += 1
        if seen >= window:
            break
    streak = min(run, window) / window

    return RollingMetrics(rolling_accuracy, accuracy_trend, mean_engagement, pace, streak)


def compute_signals(profile: LearnerProfile, config: FusionConfig = FusionConfig()) -> SignalVector:
    """The five-signal vector the analytics layer consumes.

    Derived from history alone, so a hand-built profile with stale ``metrics``
    still yields correct signals. A fresh profile yields the cold-start vector
    (0.5, 0, 0.5, 0, 0).
    """
    return windowed_metrics(profile.history, config.window).as_signals()


def _check_ordering(profile: LearnerProfile, timestamp: int) -> None:
    last = profile.last_timestamp()
    if last is not None and timestamp < last:
        raise OrderingError(
            f"interaction at timestamp {timestamp} precedes the last recorded "
            f"interaction at {last}"
        )


def fuse_assessment(
    profile: LearnerProfile,
    result: AssessmentResult,
    config: FusionConfig = FusionConfig(),
    engagement_observed: float | None = None,
) -> LearnerProfile:
    """Fold one assessment outcome into the profile.

    Each assessed skill moves toward the score by ``mastery_rate * weight``;
    skills not yet tracked start at 0. Engagement moves toward the enclosing
    interaction's observation when one is present and is untouched otherwise.
    Raises :class:`OrderingError` if the result is older than the newest
    history entry.
    """
    _check_ordering(profile, result.timestamp)

    mastery = dict(profile.mastery)
    for skill, weight in result.skills_assessed.items():
        current = mastery.get(skill, 0.0)
        mastery[skill] = _clamp(current + config.mastery_rate * weight * (result.score - current))

    engagement = profile.engagement
    if engagement_observed is not None:
        engagement = _clamp(
            engagement + config.engagement_rate * (engagement_observed - engagement)
        )

    record = InteractionRecord(
        item_id=result.item_id,
        timestamp=result.timestamp,
        engagement_observed=engagement_observed,
        assessment=result,
    )
    history = profile.history + (record,)
    return replace(
        profile,
        mastery=mastery,
        engagement=engagement,
        history=history,
        metrics=windowed_metrics(history, config.window),
    )


def record_interaction(
    profile: LearnerProfile,
    item_id: str,
    timestamp: int,
    engagement_observed: float | None = None,
    config: FusionConfig = FusionConfig(),
) -> LearnerProfile:
    """Append an unscored interaction (content consumed, nothing assessed)."""
    _check_ordering(profile, timestamp)
    engagement = profile.engagement
    if engagement_observed is not None:
        engagement = _clamp(
            engagement + config.engagement_rate * (engagement_observed - engagement)
        )
    record = InteractionRecord(
        item_id=item_id, timestamp=timestamp, engagement_observed=engagement_observed
    )
    history = profile.history + (record,)
    return replace(
        profile,
        engagement=engagement,
        history=history,
        metrics=windowed_metrics(history, config.window),
    )
