"""Catalog file loading.

The on-disk format is JSON with two top-level arrays::

    {
      "skills": [{"id": "algebra", "prerequisites": ["arithmetic"]}, ...],
      "items":  [{"id": "alg-intro", "skills": {"algebra": 1.0},
                  "difficulty": 0.2, "modality": "video",
                  "duration_minutes": 10, "prerequisites": {"arithmetic": 0.4}},
                 ...]
    }

Structural problems (duplicate ids, unknown references, prerequisite cycles)
raise :class:`CatalogError` naming the offending id.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

from .errors import CatalogError
from .model import Catalog, ContentItem, Modality

__all__ = ["load_catalog", "parse_catalog", "demo_catalog_path", "load_demo_catalog"]

_DEMO_RESOURCE = "demo_catalog.json"


def _require(mapping: Mapping[str, Any], key: str, context: str) -> Any:
    if key not in mapping:
        raise CatalogError(f"{context} is missing required field {key!r}")
    return mapping[key]


def parse_catalog(data: Mapping[str, Any]) -> Catalog:
    """Build a validated :class:`Catalog` from already-parsed JSON data."""
    if not isinstance(data, Mapping):
        raise CatalogError("catalog document must be a JSON object")
    skills_raw = _require(data, "skills", "catalog document")
    items_raw = _require(data, "items", "catalog document")
    if not isinstance(skills_raw, list) or not isinstance(items_raw, list):
        raise CatalogError("catalog 'skills' and 'items' must be arrays")

    skill_prereqs: dict[str, tuple[str, ...]] = {}
    for entry in skills_raw:
        skill_id = _require(entry, "id", "skill entry")
        if not isinstance(skill_id, str) or not skill_id:
            raise CatalogError(f"skill id must be a non-empty string, got {skill_id!r}")
        if skill_id in skill_prereqs:
            raise CatalogError(f"duplicate skill id {skill_id!r}")
        prereqs = entry.get("prerequisites", [])
        if not isinstance(prereqs, list) or not all(isinstance(p, str) for p in prereqs):
            raise CatalogError(f"skill {skill_id!r} prerequisites must be a list of skill ids")
        skill_prereqs[skill_id] = tuple(prereqs)

    items: dict[str, ContentItem] = {}
    for entry in items_raw:
        item_id = _require(entry, "id", "item entry")
        if not isinstance(item_id, str) or not item_id:
            raise CatalogError(f"item id must be a non-empty string, got {item_id!r}")
        if item_id in items:
            raise CatalogError(f"duplicate item id {item_id!r}")
        modality_raw = _require(entry, "modality", f"item {item_id!r}")
        try:
            modality = Modality(modality_raw)
        except ValueError:
            allowed = ", ".join(m.value for m in Modality)
            raise CatalogError(
                f"item {item_id!r} has unknown modality {modality_raw!r} (allowed: {allowed})"
            ) from None
        try:
            items[item_id] = ContentItem(
                item_id=item_id,
                skills=dict(_require(entry, "skills", f"item {item_id!r}")),
                difficulty=_require(entry, "difficulty", f"item {item_id!r}"),
                modality=modality,
                duration_minutes=_require(entry, "duration_minutes", f"item {item_id!r}"),
                prerequisites=dict(entry.get("prerequisites", {})),
            )
        except (TypeError, AttributeError) as exc:
            raise CatalogError(f"item {item_id!r} is malformed: {exc}") from exc

    return Catalog(skill_prereqs=skill_prereqs, items=items)


def load_catalog(path: str | Path) -> Catalog:
    """Load and validate a catalog file."""
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as handle:
            data = json.load(handle)
    except FileNotFoundError:
        raise CatalogError(f"catalog file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise CatalogError(f"catalog file {path} is not valid JSON: {exc}") from exc
    return parse_catalog(data)


def demo_catalog_path() -> Path:
    """Filesystem path of the bundled demonstration catalog."""
    return Path(str(resources.files("adaptive_curriculum.data") / _DEMO_RESOURCE))


def load_demo_catalog() -> Catalog:
    """Load the bundled demonstration catalog (a small data-literacy course)."""
    return load_catalog(demo_catalog_path())
