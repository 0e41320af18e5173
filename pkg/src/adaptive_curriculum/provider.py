"""Natural-language explanations for recommended pathways.

Explanations are decoration: nothing downstream parses them, and every
numeric decision is made before this module is consulted. The stub provider
renders a deterministic template from the same quantities the selector used.
The remote provider posts a chat-completion request to a configured base URL;
any failure there degrades to the stub so recommendations never stall on an
upstream outage.

The API credential is read exclusively from the environment variable named in
the config. It is never read from files or command-line flags, and never
logged.
"""

from __future__ import annotations

import json
import os
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import requests

from .errors import ConfigurationError, DomainError, ProviderError, ValidationError
from .model import Catalog, LearnerProfile
from .pathways import (
    NOVELTY_DECAY,
    NEUTRAL_PREFERENCE,
    RewardConfig,
    ScoredPathway,
    difficulty_fit,
    _weighted_mastery,
)

__all__ = [
    "ProviderKind",
    "ProviderConfig",
    "Explanation",
    "explain_recommendation",
    "explain_with_fallback",
    "load_provider_config",
]

STUB_NAME = "stub"
_REQUEST_PATH = "/chat/completions"

_SYSTEM_PROMPT = (
    "You are a learning coach. Given a recommended sequence of study items "
    "with their difficulty fit, modality, and novelty, explain briefly and "
    "encouragingly why this sequence suits the learner. Mention every item."
)


class ProviderKind(str, Enum):
    STUB = "stub"
    REMOTE = "remote"


@dataclass(frozen=True)
class ProviderConfig:
    kind: ProviderKind = ProviderKind.STUB
    base_url: str | None = None
    model_name: str | None = None
    api_key_env: str = "EXPLANATION_API_KEY"
    timeout_s: float = 10.0

    def __post_init__(self) -> None:
        if not isinstance(self.kind, ProviderKind):
            raise ConfigurationError("kind must be a ProviderKind")
        if self.kind is ProviderKind.REMOTE:
            if not self.base_url:
                raise ConfigurationError("remote provider needs base_url")
            if not self.model_name:
                raise ConfigurationError("remote provider needs model_name")
        if not self.timeout_s > 0.0:
            raise ConfigurationError("timeout_s must be positive")


def load_provider_config(path: str | Path) -> ProviderConfig:
    """Read provider settings from a small JSON file.

    Recognized keys: kind, base_url, model_name, api_key_env, timeout_s.
    The file holds no secret; the key itself stays in the environment.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigurationError(f"provider config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"provider config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigurationError("provider config must be a JSON object")
    kind_raw = data.get("kind", ProviderKind.STUB.value)
    try:
        kind = ProviderKind(kind_raw)
    except ValueError:
        raise ConfigurationError(f"unknown provider kind {kind_raw!r}") from None
    return ProviderConfig(
        kind=kind,
        base_url=data.get("base_url"),
        model_name=data.get("model_name"),
        api_key_env=data.get("api_key_env", "EXPLANATION_API_KEY"),
        timeout_s=data.get("timeout_s", 10.0),
    )


@dataclass(frozen=True)
class Explanation:
    """A summary plus one rationale line per recommended item, in order."""

    summary: str
    rationale: tuple[tuple[str, str], ...]
    provider_name: str
    deterministic: bool

    def __post_init__(self) -> None:
        ids = [item_id for item_id, _text in self.rationale]
        if len(set(ids)) != len(ids):
            raise ValidationError("rationale must cover each item exactly once")


def _stub_explanation(
    profile: LearnerProfile,
    scored: ScoredPathway,
    catalog: Catalog,
    reward_config: RewardConfig,
) -> Explanation:
    counts = Counter(record.item_id for record in profile.history)
    rationale = []
    for item_id in scored.pathway.items:
        item = catalog.items[item_id]
        fit = difficulty_fit(
            item.difficulty, _weighted_mastery(item, {}, profile.mastery), reward_config
        )
        preference = profile.preferences.get(item.modality.value, NEUTRAL_PREFERENCE)
        novelty = NOVELTY_DECAY ** counts.get(item_id, 0)
        rationale.append(
            (
                item_id,
                f"{item.modality.value} at difficulty {item.difficulty:.2f}: "
                f"fit {fit:.2f}, modality match {preference:.2f}, novelty {novelty:.2f}.",
            )
        )
    summary = (
        f"Recommended {len(scored.pathway.items)} item(s): engagement {scored.engagement:.2f}, "
        f"quality {scored.quality:.2f}, reward {scored.reward:.2f}."
    )
    return Explanation(summary, tuple(rationale), STUB_NAME, deterministic=True)


def _remote_explanation(
    profile: LearnerProfile,
    scored: ScoredPathway,
    catalog: Catalog,
    config: ProviderConfig,
    reward_config: RewardConfig,
) -> Explanation:
    api_key = os.environ.get(config.api_key_env)
    if not api_key:
        raise ConfigurationError(
            f"remote provider needs an API key in ${config.api_key_env}"
        )
    stub = _stub_explanation(profile, scored, catalog, reward_config)
    item_lines = "\n".join(f"- {item_id}: {text}" for item_id, text in stub.rationale)
    payload = {
        "model": config.model_name,
        "messages": [
            {"role": "system", "content": _SYSTEM_PROMPT},
            {
                "role": "user",
                "content": (
                    f"Learner {profile.learner_id} was recommended this sequence "
                    f"(reward {scored.reward:.2f}):\n{item_lines}"
                ),
            },
        ],
    }
    url = config.base_url.rstrip("/") + _REQUEST_PATH
    try:
        response = requests.post(
            url,
            json=payload,
            headers={"Authorization": f"Bearer {api_key}"},
            timeout=config.timeout_s,
        )
        response.raise_for_status()
        body = response.json()
        content = body["choices"][0]["message"]["content"]
    except (requests.RequestException, KeyError, IndexError, TypeError, ValueError) as exc:
        raise ProviderError(f"remote explanation call failed: {exc}") from exc
    if not isinstance(content, str) or not content.strip():
        raise ProviderError("remote explanation response was empty")
    lines = [line.strip() for line in content.splitlines() if line.strip()]
    rationale = []
    for position, item_id in enumerate(scored.pathway.items):
        text = lines[position] if position < len(lines) else content.strip()
        rationale.append((item_id, text))
    return Explanation(content.strip(), tuple(rationale), config.model_name or "remote", False)


def explain_recommendation(
    profile: LearnerProfile,
    scored: ScoredPathway,
    catalog: Catalog,
    config: ProviderConfig = ProviderConfig(),
    reward_config: RewardConfig = RewardConfig(),
) -> Explanation:
    """Explain a scored recommendation through the configured provider.

    Raises :class:`ProviderError` or :class:`ConfigurationError` for remote
    failures; use :func:`explain_with_fallback` where degradation is wanted.
    """
    if not scored.pathway.items:
        raise DomainError("cannot explain an empty pathway")
    for item_id in scored.pathway.items:
        if item_id not in catalog.items:
            raise ValidationError(f"pathway references unknown item {item_id!r}")
    if config.kind is ProviderKind.REMOTE:
        return _remote_explanation(profile, scored, catalog, config, reward_config)
    return _stub_explanation(profile, scored, catalog, reward_config)


def explain_with_fallback(
    profile: LearnerProfile,
    scored: ScoredPathway,
    catalog: Catalog,
    config: ProviderConfig = ProviderConfig(),
    reward_config: RewardConfig = RewardConfig(),
) -> Explanation:
    """Like :func:`explain_recommendation`, degrading to the stub on provider
    trouble instead of raising. Explanations must never block a pathway."""
    try:
        return explain_recommendation(profile, scored, catalog, config, reward_config)
    except (ProviderError, ConfigurationError):
        return _stub_explanation(profile, scored, catalog, reward_config)
