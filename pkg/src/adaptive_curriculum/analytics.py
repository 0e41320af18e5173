"""Real-time analytics: learned signal weighting and pull-based feedback.

The composite performance estimate is a weighted sum of the five learner
signals. Weights adapt online from observed outcomes (one LMS-style step per
assessment) or offline from a dataset via mini-batch gradient descent with
early stopping. Feedback integration pulls the tracked performance level
toward the latest composite by a fixed rate, so repeated integration
contracts toward it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DomainError, ValidationError
from .model import SIGNAL_COUNT, SignalVector

__all__ = [
    "AnalyticsState",
    "TrainerConfig",
    "RetentionModel",
    "EpochStats",
    "TrainingReport",
    "composite_performance",
    "update_weights",
    "integrate_feedback",
    "train_weights",
    "write_training_report",
    "les",
    "krr",
]

#: Weights a fresh analytics state starts from: uniform, uninformative.
INITIAL_WEIGHT = 0.2


def _clamp(value: float) -> float:
    return 0.0 if value < 0.0 else 1.0 if value > 1.0 else value


@dataclass(frozen=True)
class AnalyticsState:
    """Signal weights plus the tracked performance level."""

    weights: tuple[float, ...] = (INITIAL_WEIGHT,) * SIGNAL_COUNT
    performance: float = 0.5
    tick: int = 0

    def __post_init__(self) -> None:
        if len(self.weights) != SIGNAL_COUNT:
            raise ValidationError(f"expected {SIGNAL_COUNT} weights, got {len(self.weights)}")
        if any(math.isnan(w) or math.isinf(w) for w in self.weights):
            raise ValidationError("weights must be finite")
        if math.isnan(self.performance) or not 0.0 <= self.performance <= 1.0:
            raise ValidationError("performance must be in [0, 1]")
        if self.tick < 0:
            raise ValidationError("tick must be non-negative")


@dataclass(frozen=True)
class TrainerConfig:
    """Hyperparameters for weight learning and feedback integration."""

    learning_rate: float = 3e-4
    epochs: int = 20
    batch_size: int = 16
    patience: int = 5
    validation_fraction: float = 0.15
    feedback_rate: float = 0.5

    def __post_init__(self) -> None:
        if not self.learning_rate > 0.0:
            raise ValidationError("learning_rate must be positive")
        if self.epochs < 1:
            raise ValidationError("epochs must be at least 1")
        if self.batch_size < 1:
            raise ValidationError("batch_size must be at least 1")
        if self.patience < 1:
            raise ValidationError("patience must be at least 1")
        if not 0.0 <= self.validation_fraction < 1.0:
            raise ValidationError("validation_fraction must be in [0, 1)")
        if not 0.0 < self.feedback_rate <= 1.0:
            raise ValidationError("feedback_rate must be in (0, 1]")


def _check_signals(signals: Sequence[float]) -> None:
    if len(signals) != SIGNAL_COUNT:
        raise ValidationError(f"expected {SIGNAL_COUNT} signals, got {len(signals)}")
    if any(math.isnan(s) or math.isinf(s) for s in signals):
        raise ValidationError("signals must be finite")


def composite_performance(state: AnalyticsState, signals: SignalVector) -> float:
    """Weighted sum of signals, clamped to [0, 1]."""
    _check_signals(signals)
    raw = 0.0
    for weight, signal in zip(state.weights, signals):
        raw += weight * signal
    return _clamp(raw)


def update_weights(
    state: AnalyticsState,
    signals: SignalVector,
    outcome: float,
    config: TrainerConfig = TrainerConfig(),
) -> AnalyticsState:
    """One LMS step toward predicting ``outcome`` from ``signals``.

    The prediction error uses the raw (unclamped) weighted sum; clamping here
    would zero the gradient exactly where correction is needed most. Tick and
    performance stay untouched: this adjusts the lens, not the reading.
    """
    _check_signals(signals)
    if math.isnan(outcome) or not 0.0 <= outcome <= 1.0:
        raise ValidationError("outcome must be in [0, 1]")
    prediction = 0.0
    for weight, signal in zip(state.weights, signals):
        prediction += weight * signal
    error = outcome - prediction
    step = config.learning_rate
    new_weights = tuple(
        weight + step * error * signal for weight, signal in zip(state.weights, signals)
    )
    return AnalyticsState(new_weights, state.performance, state.tick)


def integrate_feedback(
    state: AnalyticsState,
    observed: float,
    config: TrainerConfig = TrainerConfig(),
) -> AnalyticsState:
    """Pull tracked performance toward an observed composite; advances the tick.

    Written in delta form so ``observed == performance`` is an exact fixed
    point, and each application contracts the gap by ``1 - feedback_rate``.
    """
    if math.isnan(observed) or not 0.0 <= observed <= 1.0:
        raise ValidationError("observed performance must be in [0, 1]")
    pulled = state.performance + config.feedback_rate * (observed - state.performance)
    return AnalyticsState(state.weights, _clamp(pulled), state.tick + 1)


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    train_mse: float
    val_mse: float


@dataclass(frozen=True)
class TrainingReport:
    """Per-epoch error curve from :func:`train_weights`."""

    epochs: tuple[EpochStats, ...]
    stopped_early: bool
    best_epoch: int


def train_weights(
    dataset: Sequence[tuple[Sequence[float], float]],
    config: TrainerConfig = TrainerConfig(),
    seed: int = 0,
) -> tuple[tuple[float, ...], TrainingReport]:
    """Fit signal weights by seeded mini-batch gradient descent.

    The dataset is shuffled once (seeded) and the last
    ``ceil(validation_fraction * N)`` examples are held out. Each epoch
    reshuffles the training split and applies batch-averaged LMS steps (the
    batch average of :func:`update_weights` applied to each example from the
    same starting point). Training stops early when validation MSE has not
    improved for ``patience`` consecutive epochs; the weights returned are
    those of the best validation epoch.
    """
    size = len(dataset)
    if size < 2:
        raise ValidationError("training needs at least 2 examples")
    features = np.asarray([list(signals) for signals, _outcome in dataset], dtype=np.float64)
    targets = np.asarray([outcome for _signals, outcome in dataset], dtype=np.float64)
    if features.ndim != 2 or features.shape[1] != SIGNAL_COUNT:
        raise ValidationError(f"each example needs {SIGNAL_COUNT} signals")
    if not np.isfinite(features).all() or not np.isfinite(targets).all():
        raise ValidationError("training data must be finite")

    rng = np.random.default_rng(seed)
    order = rng.permutation(size)
    features, targets = features[order], targets[order]
    held_out = math.ceil(config.validation_fraction * size)
    held_out = min(held_out, size - 1)
    split = size - held_out
    train_x, train_y = features[:split], targets[:split]
    val_x, val_y = features[split:], targets[split:]

    weights = np.zeros(SIGNAL_COUNT)
    best_weights = weights.copy()
    best_mse = math.inf
    best_epoch = 0
    stale = 0
    stopped_early = False
    curve: list[EpochStats] = []

    for epoch in range(1, config.epochs + 1):
        perm = rng.permutation(split)
        for start in range(0, split, config.batch_size):
            batch = perm[start : start + config.batch_size]
            residual = train_y[batch] - train_x[batch] @ weights
            weights = weights + config.learning_rate * (train_x[batch].T @ residual) / len(batch)
        train_mse = float(np.mean((train_y - train_x @ weights) ** 2))
        if held_out:
            val_mse = float(np.mean((val_y - val_x @ weights) ** 2))
        else:
            val_mse = train_mse
        curve.append(EpochStats(epoch, train_mse, val_mse))
        if val_mse < best_mse:
            best_mse = val_mse
            best_weights = weights.copy()
            best_epoch = epoch
            stale = 0
        else:
            stale += 1
            if stale >= config.patience:
                stopped_early = True
                break

    report = TrainingReport(tuple(curve), stopped_early, best_epoch)
    return tuple(float(w) for w in best_weights), report


def write_training_report(report: TrainingReport, path: str | Path) -> None:
    """Write the error curve as a tab-separated file.

    Columns: epoch, train_mse, val_mse, stopped_early. The flag is true only
    on the row where training actually stopped short.
    """
    path = Path(path)
    lines = ["epoch\ttrain_mse\tval_mse\tstopped_early"]
    last = report.epochs[-1].epoch if report.epochs else None
    for stats in report.epochs:
        flag = "true" if report.stopped_early and stats.epoch == last else "false"
        lines.append(f"{stats.epoch}\t{stats.train_mse!r}\t{stats.val_mse!r}\t{flag}")
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text("\n".join(lines) + "\n", encoding="utf-8")
    tmp.replace(path)


def les(engagement_values: Iterable[float]) -> float:
    """Learning Engagement Score: mean observed engagement on a 0-100 scale."""
    values = list(engagement_values)
    if not values:
        raise DomainError("cannot score engagement without observations")
    for value in values:
        if math.isnan(value) or not 0.0 <= value <= 1.0:
            raise ValidationError(f"engagement value out of [0, 1]: {value!r}")
    return 100.0 * (sum(values) / len(values))


@dataclass(frozen=True)
class RetentionModel:
    """Exponential forgetting with exposure-extended stability.

    Stability for a skill is ``base_stability * (1 + review_bonus * exposures)``
    ticks; retention after ``delay`` ticks is ``exp(-delay / stability)``.
    """

    base_stability: float = 5.0
    review_bonus: float = 1.0
    delay: float = 10.0

    def __post_init__(self) -> None:
        if not self.base_stability > 0.0:
            raise ValidationError("base_stability must be positive")
        if self.review_bonus < 0.0:
            raise ValidationError("review_bonus must be non-negative")
        if self.delay < 0.0:
            raise ValidationError("delay must be non-negative")

    def retention(self, exposures: int) -> float:
        stability = self.base_stability * (1.0 + self.review_bonus * exposures)
        return math.exp(-self.delay / stability)


def krr(
    end_mastery: Mapping[str, float],
    exposures: Mapping[str, int],
    model: RetentionModel = RetentionModel(),
) -> float:
    """Knowledge Retention Rate: mastery-weighted retention on a 0-100 scale.

    Projects each skill's end-of-session mastery through the forgetting curve
    and reports retained mastery as a percentage of what was held. Zero delay
    returns exactly 100. Rejects an empty or all-zero mastery map: there is
    nothing to retain.
    """
    if not end_mastery:
        raise DomainError("cannot score retention without any skills")
    for skill, value in end_mastery.items():
        if math.isnan(value) or not 0.0 <= value <= 1.0:
            raise ValidationError(f"mastery for {skill!r} out of [0, 1]: {value!r}")
    total = sum(end_mastery.values())
    if total <= 0.0:
        raise DomainError("cannot score retention when all mastery is zero")
    if model.delay == 0.0:
        return 100.0
    retained = 0.0
    for skill, value in end_mastery.items():
        retained += value * model.retention(int(exposures.get(skill, 0)))
    return 100.0 * (retained / total)
