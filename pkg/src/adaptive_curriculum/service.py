"""HTTP session service: live adaptive sessions over an append-only event log.

Every session mutation is expressed as a pure state transition that also
yields the events to persist. Live requests run the transition, append the
events (one JSON object per line), then commit the new state; replay folds
the same transitions over the stored events. State equality between the two
is therefore exact, not approximate.

Within a session, writes are serialized by a per-session lock. Sessions are
independent of each other. Event sequence numbers are dense and start at 1;
a gap or duplicate in a stored log raises :class:`IntegrityError` naming the
first bad sequence number.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .analytics import (
    AnalyticsState,
    TrainerConfig,
    composite_performance,
    integrate_feedback,
    update_weights,
)
from .curriculum import (
    DEFAULT_MASTERY_THRESHOLD,
    Curriculum,
    LearnerContext,
    generate_curriculum,
    refresh_curriculum,
)
from .errors import (
    DomainError,
    EngineError,
    IntegrityError,
    OrderingError,
    ValidationError,
)
from .fusion import fuse_assessment, record_interaction
from .model import AssessmentResult, Catalog, FusionConfig, LearnerProfile, Modality
from .pathways import Pathway, RewardConfig, ScoredPathway, recommend
from .provider import ProviderConfig, explain_with_fallback
from .simulate import AblationStrategy, SimConfig, run_session, session_report_document

__all__ = ["create_app", "replay_log", "SessionState", "EventRecord"]

SNAPSHOT_EVERY = 25

STATUS_ACTIVE = "active"
STATUS_COMPLETED = "completed"

KIND_CREATED = "created"
KIND_ITEM_SERVED = "item_served"
KIND_ASSESSMENT = "assessment_submitted"
KIND_PATHWAY = "pathway_selected"
KIND_REFRESHED = "curriculum_refreshed"


class _NotFound(EngineError):
    pass


class _Gone(EngineError):
    pass


class _Conflict(EngineError):
    pass


@dataclass(frozen=True)
class EventRecord:
    session_id: str
    seq: int
    kind: str
    tick: int
    payload: dict[str, Any]

    def to_line(self) -> str:
        return json.dumps(
            {
                "session_id": self.session_id,
                "seq": self.seq,
                "kind": self.kind,
                "tick": self.tick,
                "payload": self.payload,
            },
            sort_keys=True,
        )


@dataclass(frozen=True)
class SessionState:
    """Complete session snapshot; every field is reproducible from the log."""

    session_id: str
    learner_id: str
    objectives: tuple[str, ...]
    profile: LearnerProfile
    curriculum: Curriculum
    analytics: AnalyticsState
    pathway: ScoredPathway | None
    status: str
    tick: int
    assessments: int
    performance_history: tuple[tuple[int, float], ...]
    reward_config: RewardConfig
    fusion_config: FusionConfig
    trainer_config: TrainerConfig
    mastery_threshold: float


def _select(state_profile, curriculum, objectives, catalog, config) -> ScoredPathway | None:
    if not curriculum.units:
        return None
    context = LearnerContext(state_profile, curriculum, objectives)
    try:
        return recommend(context, catalog, config)
    except DomainError:
        return None


def _assessment_target(state: SessionState, catalog: Catalog) -> tuple[list[str], str | None]:
    """Items auto-served before the next assessment, and the quiz to answer.

    The target is the first quiz in the current pathway; a pathway of pure
    study content falls back to the quiz closest to the active unit's mastery,
    mirroring how a teacher would interleave a formative check.
    """
    study: list[str] = []
    if state.pathway is not None:
        for item_id in state.pathway.pathway.items:
            if catalog.items[item_id].modality is Modality.QUIZ:
                return study, item_id
            study.append(item_id)
    for unit in state.curriculum.units:
        quizzes = catalog.quiz_items_for_skill(unit.target_skill)
        if quizzes:
            mastery = state.profile.mastery.get(unit.target_skill, 0.0)
            target = min(
                quizzes,
                key=lambda iid: (abs(catalog.items[iid].difficulty - mastery), iid),
            )
            return study, target
    return study, None


def _require_unit_interval(value: Any, field: str) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ValidationError(f"{field} must be a number")
    if not 0.0 <= float(value) <= 1.0:
        raise ValidationError(f"{field} must be in [0, 1]")
    return float(value)


def _create_transition(
    catalog: Catalog,
    payload: dict[str, Any],
    defaults: _Defaults,
) -> tuple[SessionState, list[tuple[str, dict[str, Any], int]]]:
    """Build the initial session state plus the events describing it."""
    session_id = payload["session_id"]
    learner_id = payload.get("learner_id") or "learner"
    objectives_raw = payload.get("objectives")
    if not isinstance(objectives_raw, list) or not all(
        isinstance(s, str) for s in objectives_raw
    ):
        raise ValidationError("objectives must be a list of skill ids")
    for skill in objectives_raw:
        if skill not in catalog.skill_prereqs:
            raise ValidationError(f"unknown objective skill {skill!r}")
    objectives = tuple(objectives_raw)

    overrides = payload.get("overrides") or {}
    if not isinstance(overrides, dict):
        raise ValidationError("overrides must be an object")

    reward_config = defaults.reward
    if any(k in overrides for k in ("beta", "gamma", "horizon", "beam_width")):
        reward_config = replace(
            reward_config,
            engagement_weight=float(overrides.get("beta", reward_config.engagement_weight)),
            quality_weight=float(overrides.get("gamma", reward_config.quality_weight)),
            horizon=int(overrides.get("horizon", reward_config.horizon)),
            beam_width=int(overrides.get("beam_width", reward_config.beam_width)),
        )
    fusion_config = defaults.fusion
    if any(k in overrides for k in ("mastery_rate", "engagement_rate", "window")):
        fusion_config = FusionConfig(
            mastery_rate=float(overrides.get("mastery_rate", fusion_config.mastery_rate)),
            engagement_rate=float(
                overrides.get("engagement_rate", fusion_config.engagement_rate)
            ),
            window=int(overrides.get("window", fusion_config.window)),
        )
    threshold = float(overrides.get("mastery_threshold", defaults.threshold))
    if not 0.0 < threshold <= 1.0:
        raise ValidationError("mastery_threshold must be in (0, 1]")

    profile = LearnerProfile.cold_start(learner_id, catalog.skill_ids)
    mastery_overrides = overrides.get("mastery") or {}
    if not isinstance(mastery_overrides, dict):
        raise ValidationError("overrides.mastery must be an object")
    for skill, value in mastery_overrides.items():
        if skill not in catalog.skill_prereqs:
            raise ValidationError(f"mastery override for unknown skill {skill!r}")
        _require_unit_interval(value, f"mastery override for {skill!r}")
    if mastery_overrides:
        profile = profile.with_mastery({s: float(v) for s, v in mastery_overrides.items()})
    preference_overrides = overrides.get("preferences") or {}
    if preference_overrides:
        if not isinstance(preference_overrides, dict):
            raise ValidationError("overrides.preferences must be an object")
        merged = dict(profile.preferences)
        for modality, value in preference_overrides.items():
            merged[str(modality)] = _require_unit_interval(
                value, f"preference override for {modality!r}"
            )
        profile = replace(profile, preferences=merged)

    curriculum = generate_curriculum(profile, catalog, objectives, threshold, generated_at=0)
    pathway = _select(profile, curriculum, objectives, catalog, reward_config)
    status = STATUS_ACTIVE if curriculum.units else STATUS_COMPLETED

    analytics = AnalyticsState()
    state = SessionState(
        session_id=session_id,
        learner_id=learner_id,
        objectives=objectives,
        profile=profile,
        curriculum=curriculum,
        analytics=analytics,
        pathway=pathway,
        status=status,
        tick=0,
        assessments=0,
        performance_history=((0, analytics.performance),),
        reward_config=reward_config,
        fusion_config=fusion_config,
        trainer_config=defaults.trainer,
        mastery_threshold=threshold,
    )
    events: list[tuple[str, dict[str, Any], int]] = [(KIND_CREATED, dict(payload), 0)]
    if pathway is not None:
        events.append((KIND_PATHWAY, _pathway_payload(pathway, "create", reward_config), 0))
    return state, events


def _pathway_payload(
    scored: ScoredPathway, origin: str, config: RewardConfig
) -> dict[str, Any]:
    return {
        "items": list(scored.pathway.items),
        "engagement": scored.engagement,
        "quality": scored.quality,
        "reward": scored.reward,
        "origin": origin,
        "beta": config.engagement_weight,
        "gamma": config.quality_weight,
    }


def _assessment_transition(
    state: SessionState,
    catalog: Catalog,
    body: dict[str, Any],
) -> tuple[SessionState, list[tuple[str, dict[str, Any], int]]]:
    """Apply one submitted assessment: serve, fuse, re-evaluate, re-select."""
    if state.status != STATUS_ACTIVE:
        raise _Gone("session already completed")

    sequence = body.get("sequence")
    if not isinstance(sequence, int) or isinstance(sequence, bool):
        raise ValidationError("sequence must be an integer")
    expected = state.assessments + 1
    if sequence != expected:
        raise _Conflict(f"sequence {sequence} rejected; expected {expected}")

    item_id = body.get("item_id")
    if not isinstance(item_id, str) or not item_id:
        raise ValidationError("item_id must be a non-empty string")
    item = catalog.items.get(item_id)
    if item is None:
        raise ValidationError(f"unknown item {item_id!r}")

    study, target = _assessment_target(state, catalog)
    if target is None:
        raise DomainError("session has no assessable item to submit against")
    if item_id != target:
        raise ValidationError(
            f"item {item_id!r} is not the served assessment target (expected {target!r})"
        )

    score = body.get("score")
    if not isinstance(score, (int, float)) or isinstance(score, bool):
        raise ValidationError("score must be a number")
    response_time_s = body.get("response_time_s", 30.0)
    engagement_observed = body.get("engagement_observed")
    if engagement_observed is not None:
        engagement_observed = _require_unit_interval(engagement_observed, "engagement_observed")
    skills_assessed = body.get("skills_assessed")
    if skills_assessed is None:
        skills_assessed = dict(item.skills)
    if not isinstance(skills_assessed, dict) or not skills_assessed:
        raise ValidationError("skills_assessed must be a non-empty object")
    for skill in skills_assessed:
        if skill not in catalog.skill_prereqs:
            raise ValidationError(f"assessed skill {skill!r} is not in the catalog")

    events: list[tuple[str, dict[str, Any], int]] = []
    profile = state.profile
    tick = state.tick
    for study_id in study:
        tick += 1
        profile = record_interaction(
            profile, study_id, tick, engagement_observed=None, config=state.fusion_config
        )
        events.append((KIND_ITEM_SERVED, {"item_id": study_id}, tick))

    tick += 1
    timestamp = body.get("timestamp")
    if timestamp is not None:
        if not isinstance(timestamp, int) or isinstance(timestamp, bool):
            raise ValidationError("timestamp must be an integer")
        last = profile.last_timestamp()
        if last is not None and timestamp < last:
            raise OrderingError(
                f"timestamp {timestamp} precedes the last interaction at {last}"
            )
        tick = max(tick, timestamp)
    else:
        timestamp = tick

    result = AssessmentResult(
        item_id=item_id,
        skills_assessed={str(s): float(w) for s, w in skills_assessed.items()},
        score=float(score),
        response_time_s=float(response_time_s),
        timestamp=timestamp,
    )

    analytics = update_weights(
        state.analytics,
        profile.metrics.as_signals(),
        result.score,
        state.trainer_config,
    )
    profile = fuse_assessment(
        profile, result, state.fusion_config, engagement_observed=engagement_observed
    )
    estimate = composite_performance(analytics, profile.metrics.as_signals())
    analytics = integrate_feedback(analytics, estimate, state.trainer_config)
    events.append(
        (
            KIND_ASSESSMENT,
            {
                "sequence": sequence,
                "item_id": item_id,
                "score": result.score,
                "response_time_s": result.response_time_s,
                "timestamp": timestamp,
                "engagement_observed": engagement_observed,
                "skills_assessed": result.skills_assessed,
            },
            tick,
        )
    )

    curriculum = refresh_curriculum(
        profile,
        catalog,
        state.curriculum,
        state.objectives,
        state.mastery_threshold,
    )
    events.append(
        (
            KIND_REFRESHED,
            {"targets": list(curriculum.targets()), "generated_at": curriculum.generated_at},
            tick,
        )
    )

    pathway = _select(profile, curriculum, state.objectives, catalog, state.reward_config)
    if pathway is not None:
        events.append((KIND_PATHWAY, _pathway_payload(pathway, "submit", state.reward_config), tick))
    status = STATUS_ACTIVE if curriculum.units else STATUS_COMPLETED

    new_state = replace(
        state,
        profile=profile,
        curriculum=curriculum,
        analytics=analytics,
        pathway=pathway,
        status=status,
        tick=tick,
        assessments=sequence,
        performance_history=state.performance_history + ((tick, analytics.performance),),
    )
    return new_state, events


def _adopt_transition(
    state: SessionState,
    catalog: Catalog,
    payload: dict[str, Any],
) -> tuple[SessionState, list[tuple[str, dict[str, Any], int]]]:
    """Adopt what-if weights: they become the session's reward config."""
    if state.status != STATUS_ACTIVE:
        raise _Gone("session already completed")
    config = replace(
        state.reward_config,
        engagement_weight=float(payload["beta"]),
        quality_weight=float(payload["gamma"]),
    )
    pathway = _select(state.profile, state.curriculum, state.objectives, catalog, config)
    if pathway is None:
        raise DomainError("no eligible pathway under the requested weights")
    new_state = replace(state, reward_config=config, pathway=pathway)
    events = [(KIND_PATHWAY, _pathway_payload(pathway, "adopt", config), state.tick)]
    return new_state, events


@dataclass(frozen=True)
class _Defaults:
    reward: RewardConfig
    fusion: FusionConfig
    trainer: TrainerConfig
    threshold: float


class SessionStore:
    """In-memory sessions backed by per-session event log files."""

    def __init__(self, catalog: Catalog, data_dir: Path, defaults: _Defaults) -> None:
        self.catalog = catalog
        self.data_dir = data_dir
        self.defaults = defaults
        self._lock = threading.Lock()
        self._sessions: dict[str, _LiveSession] = {}
        data_dir.mkdir(parents=True, exist_ok=True)

    def create(self, payload: dict[str, Any]) -> SessionState:
        session_id = uuid.uuid4().hex
        payload = dict(payload)
        payload["session_id"] = session_id
        state, pending = _create_transition(self.catalog, payload, self.defaults)
        live = _LiveSession(
            state=state,
            lock=threading.Lock(),
            path=self.data_dir / f"{session_id}.ndjson",
            events=[],
        )
        live.append(pending)
        with self._lock:
            self._sessions[session_id] = live
        return state

    def get(self, session_id: str) -> _LiveSession:
        with self._lock:
            live = self._sessions.get(session_id)
        if live is None:
            raise _NotFound(f"unknown session {session_id!r}")
        return live

    def submit(self, session_id: str, body: dict[str, Any]) -> SessionState:
        live = self.get(session_id)
        with live.lock:
            new_state, pending = _assessment_transition(live.state, self.catalog, body)
            live.append(pending)
            live.state = new_state
        return new_state

    def adopt(self, session_id: str, beta: float, gamma: float) -> SessionState:
        live = self.get(session_id)
        with live.lock:
            new_state, pending = _adopt_transition(
                live.state, self.catalog, {"beta": beta, "gamma": gamma}
            )
            live.append(pending)
            live.state = new_state
        return new_state

    def replay(self, session_id: str) -> SessionState:
        live = self.get(session_id)
        return replay_log(live.path, self.catalog, self.defaults)


class _LiveSession:
    def __init__(
        self, state: SessionState, lock: threading.Lock, path: Path, events: list[EventRecord]
    ) -> None:
        self.state = state
        self.lock = lock
        self.path = path
        self.events = events

    def append(self, pending: list[tuple[str, dict[str, Any], int]]) -> None:
        """Persist a batch of events; the batch is written in one call."""
        records = []
        next_seq = len(self.events) + 1
        for offset, (kind, payload, tick) in enumerate(pending):
            records.append(
                EventRecord(
                    session_id=self.state.session_id,
                    seq=next_seq + offset,
                    kind=kind,
                    tick=tick,
                    payload=payload,
                )
            )
        lines = "".join(record.to_line() + "\n" for record in records)
        with self.path.open("a", encoding="utf-8") as handle:
            handle.write(lines)
        before = len(self.events)
        self.events.extend(records)
        if before // SNAPSHOT_EVERY != len(self.events) // SNAPSHOT_EVERY:
            self._write_snapshot()

    def _write_snapshot(self) -> None:
        snapshot = {
            "session_id": self.state.session_id,
            "events": len(self.events),
            "status": self.state.status,
            "tick": self.state.tick,
            "assessments": self.state.assessments,
            "note": "advisory snapshot; replay always folds the full event log",
        }
        path = self.path.with_suffix(".snapshot.json")
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_text(json.dumps(snapshot, sort_keys=True, indent=2) + "\n", encoding="utf-8")
        tmp.replace(path)


def replay_log(path: str | Path, catalog: Catalog, defaults: _Defaults | None = None) -> SessionState:
    """Rebuild session state purely from an event log file.

    Validates that sequence numbers are dense starting at 1; the first gap or
    duplicate is reported by number. Only state-bearing events are folded:
    served items and assessments re-run the live transitions, adopt events
    re-run selection, and derived records (create/submit pathway selections,
    curriculum refreshes) are skipped because the transitions regenerate them.
    """
    if defaults is None:
        defaults = _Defaults(RewardConfig(), FusionConfig(), TrainerConfig(), DEFAULT_MASTERY_THRESHOLD)
    path = Path(path)
    if not path.exists():
        raise IntegrityError(f"event log not found: {path}")
    records: list[EventRecord] = []
    with path.open("r", encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise IntegrityError(f"event log line {line_number} is not valid JSON") from exc
            records.append(
                EventRecord(
                    session_id=raw["session_id"],
                    seq=raw["seq"],
                    kind=raw["kind"],
                    tick=raw["tick"],
                    payload=raw["payload"],
                )
            )
    if not records:
        raise IntegrityError("event log is empty")
    for position, record in enumerate(records, start=1):
        if record.seq != position:
            raise IntegrityError(
                f"event log sequence broken at {record.seq} (expected {position})"
            )
    if records[0].kind != KIND_CREATED:
        raise IntegrityError("event log does not start with a created event")

    state, _events = _create_transition(catalog, dict(records[0].payload), defaults)
    for record in records[1:]:
        if record.kind == KIND_ASSESSMENT:
            state, _events = _assessment_transition(state, catalog, dict(record.payload))
        elif record.kind == KIND_PATHWAY and record.payload.get("origin") == "adopt":
            state, _events = _adopt_transition(state, catalog, dict(record.payload))
        elif record.kind in (KIND_ITEM_SERVED, KIND_REFRESHED, KIND_PATHWAY):
            continue
        else:
            raise IntegrityError(f"unknown event kind {record.kind!r} at sequence {record.seq}")
    return state


def _item_card(catalog: Catalog, item_id: str) -> dict[str, Any]:
    item = catalog.items[item_id]
    return {
        "item_id": item.item_id,
        "modality": item.modality.value,
        "difficulty": item.difficulty,
        "duration_minutes": item.duration_minutes,
        "skills": dict(item.skills),
        "prerequisites": dict(item.prerequisites),
    }


def _pathway_view(catalog: Catalog, scored: ScoredPathway | None) -> dict[str, Any] | None:
    if scored is None:
        return None
    return {
        "items": [_item_card(catalog, item_id) for item_id in scored.pathway.items],
        "engagement": scored.engagement,
        "quality": scored.quality,
        "reward": scored.reward,
    }


def _session_view(store: SessionStore, live: _LiveSession) -> dict[str, Any]:
    state = live.state
    signals = state.profile.metrics
    return {
        "session_id": state.session_id,
        "learner_id": state.learner_id,
        "status": state.status,
        "objectives": list(state.objectives),
        "tick": state.tick,
        "assessments": state.assessments,
        "next_sequence": state.assessments + 1,
        "mastery": {skill: state.profile.mastery[skill] for skill in sorted(state.profile.mastery)},
        "engagement": state.profile.engagement,
        "preferences": dict(state.profile.preferences),
        "signals": {
            "rolling_accuracy": signals.rolling_accuracy,
            "accuracy_trend": signals.accuracy_trend,
            "mean_engagement": signals.mean_engagement,
            "pace": signals.pace,
            "streak": signals.streak,
        },
        "performance": state.analytics.performance,
        "performance_history": [[tick, value] for tick, value in state.performance_history],
        "weights": list(state.analytics.weights),
        "curriculum": {
            "generated_at": state.curriculum.generated_at,
            "units": [
                {
                    "target_skill": unit.target_skill,
                    "mastery_threshold": unit.mastery_threshold,
                    "item_pool": list(unit.item_pool),
                }
                for unit in state.curriculum.units
            ],
        },
        "pathway": _pathway_view(store.catalog, state.pathway),
        "reward_weights": {
            "beta": state.reward_config.engagement_weight,
            "gamma": state.reward_config.quality_weight,
        },
        "events": [
            {"seq": record.seq, "kind": record.kind, "tick": record.tick}
            for record in live.events
        ],
    }


def _error(status: int, code: str, message: str, field: str | None = None) -> JSONResponse:
    body: dict[str, Any] = {"code": code, "message": message}
    if field is not None:
        body["field"] = field
    return JSONResponse(status_code=status, content=body)


def create_app(
    catalog: Catalog,
    data_dir: str | Path = "data/sessions",
    provider_config: ProviderConfig | None = ProviderConfig(),
    reward_config: RewardConfig = RewardConfig(),
    fusion_config: FusionConfig = FusionConfig(),
    trainer_config: TrainerConfig = TrainerConfig(),
    mastery_threshold: float = DEFAULT_MASTERY_THRESHOLD,
) -> FastAPI:
    """Build the session service around one catalog.

    ``provider_config=None`` disables explanations entirely; recommendations
    and all numeric behavior are unaffected.
    """
    defaults = _Defaults(reward_config, fusion_config, trainer_config, mastery_threshold)
    store = SessionStore(catalog, Path(data_dir), defaults)
    app = FastAPI(title="adaptive-curriculum", docs_url=None, redoc_url=None)
    app.state.store = store
    # The browser client may be served from a different origin than the API.
    # No credentials are involved, so a blanket allowance is safe here.
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["GET", "POST"],
        allow_headers=["content-type"],
    )

    @app.exception_handler(RequestValidationError)
    async def handle_request_validation(request: Request, exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        field = ".".join(str(part) for part in first.get("loc", []) if part != "body") or None
        return _error(400, "validation", first.get("msg", "invalid request"), field)

    @app.exception_handler(ValidationError)
    async def handle_validation(request: Request, exc: ValidationError):
        return _error(400, "validation", str(exc))

    @app.exception_handler(_NotFound)
    async def handle_not_found(request: Request, exc: _NotFound):
        return _error(404, "not_found", str(exc))

    @app.exception_handler(_Conflict)
    async def handle_conflict(request: Request, exc: _Conflict):
        return _error(409, "conflict", str(exc), "sequence")

    @app.exception_handler(_Gone)
    async def handle_gone(request: Request, exc: _Gone):
        return _error(410, "gone", str(exc))

    @app.exception_handler(DomainError)
    async def handle_domain(request: Request, exc: DomainError):
        return _error(409, "conflict", str(exc))

    @app.exception_handler(IntegrityError)
    async def handle_integrity(request: Request, exc: IntegrityError):
        return _error(500, "integrity", str(exc))

    @app.get("/healthz")
    async def healthz():
        return {"status": "ok"}

    @app.post("/sessions", status_code=201)
    async def create_session(body: dict[str, Any]):
        state = store.create(body)
        return _session_view(store, store.get(state.session_id))

    @app.get("/sessions/{session_id}")
    async def get_session(session_id: str):
        return _session_view(store, store.get(session_id))

    @app.get("/sessions/{session_id}/profile")
    async def get_profile(session_id: str):
        view = _session_view(store, store.get(session_id))
        return {
            "session_id": view["session_id"],
            "learner_id": view["learner_id"],
            "mastery": view["mastery"],
            "engagement": view["engagement"],
            "preferences": view["preferences"],
            "signals": view["signals"],
            "performance": view["performance"],
            "history_length": len(store.get(session_id).state.profile.history),
        }

    @app.get("/sessions/{session_id}/next")
    async def get_next(
        session_id: str,
        beta: float | None = Query(default=None),
        gamma: float | None = Query(default=None),
        adopt: bool = Query(default=False),
    ):
        live = store.get(session_id)
        state = live.state
        if state.status != STATUS_ACTIVE:
            raise _Gone("session already completed")

        override = beta is not None or gamma is not None
        effective_beta = state.reward_config.engagement_weight if beta is None else beta
        effective_gamma = state.reward_config.quality_weight if gamma is None else gamma
        if effective_beta < 0.0 or effective_gamma < 0.0:
            raise ValidationError("beta and gamma must be non-negative")
        if effective_beta + effective_gamma <= 0.0:
            raise ValidationError("beta and gamma must not both be zero")

        if adopt:
            state = store.adopt(session_id, effective_beta, effective_gamma)
            scored = state.pathway
        elif override:
            config = replace(
                state.reward_config,
                engagement_weight=effective_beta,
                quality_weight=effective_gamma,
            )
            scored = _select(state.profile, state.curriculum, state.objectives, store.catalog, config)
        else:
            scored = state.pathway

        study, target = _assessment_target(
            replace(state, pathway=scored) if scored is not state.pathway else state,
            store.catalog,
        )
        explanation = None
        if provider_config is not None and scored is not None:
            rendered = explain_with_fallback(
                state.profile, scored, store.catalog, provider_config, state.reward_config
            )
            explanation = {
                "summary": rendered.summary,
                "rationale": [
                    {"item_id": item_id, "text": text} for item_id, text in rendered.rationale
                ],
                "provider": rendered.provider_name,
                "deterministic": rendered.deterministic,
            }
        return {
            "session_id": session_id,
            "status": state.status,
            "what_if": override and not adopt,
            "beta": effective_beta,
            "gamma": effective_gamma,
            "pathway": _pathway_view(store.catalog, scored),
            "study_items": [_item_card(store.catalog, item_id) for item_id in study],
            "next_item": _item_card(store.catalog, target) if target else None,
            "next_sequence": state.assessments + 1,
            "explanation": explanation,
        }

    @app.post("/sessions/{session_id}/assessments")
    async def post_assessment(session_id: str, body: dict[str, Any]):
        state = store.submit(session_id, body)
        live = store.get(session_id)
        study, target = _assessment_target(state, store.catalog)
        return {
            "session_id": session_id,
            "status": state.status,
            "assessments": state.assessments,
            "next_sequence": state.assessments + 1,
            "mastery": {skill: state.profile.mastery[skill] for skill in sorted(state.profile.mastery)},
            "engagement": state.profile.engagement,
            "performance": state.analytics.performance,
            "signals": _session_view(store, live)["signals"],
            "pathway": _pathway_view(store.catalog, state.pathway),
            "next_item": _item_card(store.catalog, target) if target else None,
            "curriculum_targets": list(state.curriculum.targets()),
        }

    @app.post("/simulations")
    async def post_simulation(body: dict[str, Any]):
        config_kwargs: dict[str, Any] = {}
        if "seed" in body:
            config_kwargs["seed"] = int(body["seed"])
        for key in ("cohort_size", "episodes", "formative_every"):
            if key in body:
                config_kwargs[key] = int(body[key])
        if "retention_delay" in body:
            config_kwargs["retention_delay"] = float(body["retention_delay"])
        if "strategy" in body:
            config_kwargs["strategy"] = AblationStrategy.parse(str(body["strategy"]))
        if "objectives" in body and body["objectives"] is not None:
            config_kwargs["objectives"] = tuple(body["objectives"])
        if "reselect_policy" in body:
            config_kwargs["reselect_policy"] = str(body["reselect_policy"])
        config = SimConfig(**config_kwargs)
        report = run_session(store.catalog, config, defaults.reward, defaults.fusion, defaults.trainer)
        return session_report_document(report)

    return app
