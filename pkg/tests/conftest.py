import pytest

from adaptive_curriculum import Catalog, ContentItem, Modality, load_demo_catalog


@pytest.fixture(scope="session")
def demo_catalog() -> Catalog:
    return load_demo_catalog()


def make_item(
    item_id: str,
    skills: dict[str, float],
    difficulty: float,
    modality: Modality = Modality.TEXT,
    duration: float = 10.0,
    prerequisites: dict[str, float] | None = None,
) -> ContentItem:
    return ContentItem(
        item_id=item_id,
        skills=skills,
        difficulty=difficulty,
        modality=modality,
        duration_minutes=duration,
        prerequisites=prerequisites or {},
    )


@pytest.fixture()
def two_skill_catalog() -> Catalog:
    """Minimal catalog: one foundation skill, one dependent, three items."""
    return Catalog(
        skill_prereqs={"alpha": (), "beta": ("alpha",)},
        items={
            "a-intro": make_item("a-intro", {"alpha": 1.0}, 0.1, Modality.VIDEO),
            "a-quiz": make_item("a-quiz", {"alpha": 1.0}, 0.3, Modality.QUIZ),
            "b-intro": make_item(
                "b-intro", {"beta": 1.0}, 0.2, Modality.TEXT, prerequisites={"alpha": 0.4}
            ),
        },
    )
