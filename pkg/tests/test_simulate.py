import dataclasses
import json
import random

import pytest

from adaptive_curriculum import (
    AblationStrategy,
    Modality,
    SimConfig,
    ValidationError,
    ablation_ranking,
    run_ablation_matrix,
    run_session,
    write_ablation_report,
    write_session_report,
)
from adaptive_curriculum.simulate import (
    REPORT_COLUMNS,
    _substream,
    engage,
    learn,
    render_table,
    report_rows,
    respond,
    session_report_document,
    spawn_cohort,
)

TINY = SimConfig(seed=11, cohort_size=4, episodes=10)


def test_strategy_values_are_report_labels():
    assert AblationStrategy.FULL_FRAMEWORK.value == "FullFramework"
    assert AblationStrategy.NO_REAL_TIME_ADJUSTMENT.value == "No Real-Time Adjustment"
    assert (
        AblationStrategy.NO_PERSONALIZED_RECOMMENDATIONS.value
        == "No Personalized Recommendations"
    )
    assert AblationStrategy.FIXED_LEARNING_PATH.value == "Fixed Learning Path"
    assert AblationStrategy.BASIC_ASSESSMENT_ONLY.value == "Basic Assessment Only"
    assert AblationStrategy.STATIC_RESOURCE_ALLOCATION.value == "Static Resource Allocation"


def test_strategy_parse_accepts_value_name_and_loose_forms():
    assert AblationStrategy.parse("FullFramework") is AblationStrategy.FULL_FRAMEWORK
    assert AblationStrategy.parse("FULL_FRAMEWORK") is AblationStrategy.FULL_FRAMEWORK
    assert (
        AblationStrategy.parse("No Real-Time Adjustment")
        is AblationStrategy.NO_REAL_TIME_ADJUSTMENT
    )
    assert (
        AblationStrategy.parse("no-real-time-adjustment")
        is AblationStrategy.NO_REAL_TIME_ADJUSTMENT
    )


def test_strategy_parse_rejects_unknown():
    with pytest.raises(ValidationError, match="unknown strategy"):
        AblationStrategy.parse("YOLO")


def test_sim_config_validation():
    with pytest.raises(ValidationError):
        SimConfig(cohort_size=-1)
    with pytest.raises(ValidationError):
        SimConfig(formative_every=0)
    with pytest.raises(ValidationError):
        SimConfig(reselect_policy="sometimes")


def test_substream_is_deterministic_and_purpose_separated():
    a = _substream(5, 3, "spawn")
    b = _substream(5, 3, "spawn")
    c = _substream(5, 3, "session")
    assert [a.random() for _ in range(4)] == [b.random() for _ in range(4)]
    assert a.random() != c.random()


def test_spawn_cohort_latent_ranges(demo_catalog):
    students = spawn_cohort(demo_catalog, SimConfig(seed=0, cohort_size=30))
    assert len(students) == 30
    for student in students:
        assert set(student.ability) == set(demo_catalog.skill_ids)
        for value in student.ability.values():
            assert 0.05 <= value <= 0.35
        assert 0.1 <= student.learn_rate <= 0.3


def test_spawn_cohort_bimodal_affinity(demo_catalog):
    students = spawn_cohort(demo_catalog, SimConfig(seed=0, cohort_size=40))
    preferred_seen = set()
    for student in students:
        affinities = student.modality_affinity
        assert set(affinities) == {m.value for m in Modality}
        high = [m for m, v in affinities.items() if v >= 0.8]
        low = [m for m, v in affinities.items() if v <= 0.4]
        # exactly one preferred modality, everything else far below it
        assert len(high) == 1
        assert len(low) == len(affinities) - 1
        preferred_seen.add(high[0])
    # across 40 draws every modality shows up as someone's preference
    assert preferred_seen == {m.value for m in Modality}


def test_students_independent_of_cohort_size(demo_catalog):
    small = spawn_cohort(demo_catalog, SimConfig(seed=9, cohort_size=3))
    large = spawn_cohort(demo_catalog, SimConfig(seed=9, cohort_size=20))
    assert small == large[:3]


def test_respond_produces_valid_results(demo_catalog):
    student = spawn_cohort(demo_catalog, SimConfig(seed=1, cohort_size=1))[0]
    item = demo_catalog.items["basics-quiz"]
    rng = random.Random(5)
    results = [respond(student, item, rng, tick=t) for t in range(1, 30)]
    scores = {r.score for r in results}
    assert scores <= {0.0, 1.0}
    for result in results:
        assert result.item_id == "basics-quiz"
        assert result.response_time_s > 0.0
        assert result.skills_assessed == item.skills


def test_respond_deterministic_given_rng_state(demo_catalog):
    student = spawn_cohort(demo_catalog, SimConfig(seed=1, cohort_size=1))[0]
    item = demo_catalog.items["basics-quiz"]
    first = respond(student, item, random.Random(42), tick=1)
    second = respond(student, item, random.Random(42), tick=1)
    assert first == second


def test_easier_items_score_better_on_average(demo_catalog):
    student = spawn_cohort(demo_catalog, SimConfig(seed=2, cohort_size=1))[0]
    easy = demo_catalog.items["basics-quiz"]
    hard = dataclasses.replace(easy, difficulty=0.95)
    rng_a, rng_b = random.Random(1), random.Random(1)
    easy_mean = sum(respond(student, easy, rng_a).score for _ in range(300)) / 300
    hard_mean = sum(respond(student, hard, rng_b).score for _ in range(300)) / 300
    assert easy_mean > hard_mean


def test_learn_raises_taught_skills_only(demo_catalog):
    student = spawn_cohort(demo_catalog, SimConfig(seed=3, cohort_size=1))[0]
    item = demo_catalog.items["basics-tour-video"]
    after = learn(student, item)
    assert after.ability["spreadsheet-basics"] > student.ability["spreadsheet-basics"]
    for skill in demo_catalog.skill_ids:
        if skill != "spreadsheet-basics":
            assert after.ability[skill] == student.ability[skill]


def test_learn_never_exceeds_one(demo_catalog):
    student = spawn_cohort(demo_catalog, SimConfig(seed=3, cohort_size=1))[0]
    item = demo_catalog.items["basics-tour-video"]
    for _ in range(200):
        student = learn(student, item)
    assert student.ability["spreadsheet-basics"] <= 1.0


def test_engage_floors_on_bad_fit(demo_catalog):
    student = spawn_cohort(demo_catalog, SimConfig(seed=4, cohort_size=1))[0]
    # difficulty far above ability collapses engagement to the floor
    too_hard = dataclasses.replace(demo_catalog.items["basics-tour-video"], difficulty=1.0)
    assert engage(student, too_hard, random.Random(0)) == 0.05


def test_engage_in_unit_interval(demo_catalog):
    student = spawn_cohort(demo_catalog, SimConfig(seed=4, cohort_size=1))[0]
    rng = random.Random(0)
    for item in demo_catalog.items.values():
        value = engage(student, item, rng)
        assert 0.0 <= value <= 1.0


def test_run_session_deterministic(demo_catalog):
    first = run_session(demo_catalog, TINY)
    second = run_session(demo_catalog, TINY)
    assert first == second


def test_run_session_interaction_count(demo_catalog):
    report = run_session(demo_catalog, TINY)
    assert report.interactions == TINY.cohort_size * TINY.episodes
    assert len(report.les_values) == TINY.cohort_size
    assert len(report.krr_values) == TINY.cohort_size


def test_run_session_scores_in_range(demo_catalog):
    report = run_session(demo_catalog, TINY)
    for value in report.les_values:
        assert 0.0 <= value <= 100.0
    for value in report.krr_values:
        assert 0.0 <= value <= 100.0


def test_run_session_rejects_degenerate_protocol(demo_catalog):
    with pytest.raises(ValidationError):
        run_session(demo_catalog, SimConfig(cohort_size=0))
    with pytest.raises(ValidationError):
        run_session(demo_catalog, SimConfig(episodes=0))
    with pytest.raises(ValidationError):
        run_session(demo_catalog, SimConfig(objectives=("ghost",)))


def test_strategies_actually_differ(demo_catalog):
    les_by_strategy = {}
    for strategy in AblationStrategy:
        config = dataclasses.replace(TINY, strategy=strategy, episodes=15)
        les_by_strategy[strategy] = run_session(demo_catalog, config).mean_les
    # the serving policies must not collapse into one behavior
    assert len(set(les_by_strategy.values())) == len(AblationStrategy)


def test_reselect_policy_recorded(demo_catalog):
    config = dataclasses.replace(TINY, reselect_policy="session_start")
    report = run_session(demo_catalog, config)
    assert report.reselect_policy == "session_start"
    assert session_report_document(report)["protocol"]["reselect_policy"] == "session_start"


def test_run_ablation_matrix_covers_grid(demo_catalog):
    reports = run_ablation_matrix(demo_catalog, TINY, seeds=[0, 1])
    assert len(reports) == 2 * len(AblationStrategy)
    seen = {(r.strategy, r.seed) for r in reports}
    assert seen == {(s.value, seed) for s in AblationStrategy for seed in (0, 1)}


def test_report_rows_and_table(demo_catalog):
    report = run_session(demo_catalog, TINY)
    rows = report_rows([report])
    assert len(rows) == 1
    assert rows[0][0] == "FullFramework"
    table = render_table([report])
    lines = table.splitlines()
    assert lines[0] == "\t".join(REPORT_COLUMNS)
    assert len(lines) == 2


def test_write_session_report_idempotent(tmp_path, demo_catalog):
    report = run_session(demo_catalog, TINY)
    paths = write_session_report(report, tmp_path)
    first = {name: path.read_bytes() for name, path in paths.items()}
    paths = write_session_report(report, tmp_path)
    second = {name: path.read_bytes() for name, path in paths.items()}
    assert first == second
    document = json.loads(paths["doc"].read_text(encoding="utf-8"))
    assert document["kind"] == "session-report"
    assert document["aggregates"]["mean_les"] == report.mean_les


def test_write_ablation_report_structure(tmp_path, demo_catalog):
    reports = run_ablation_matrix(demo_catalog, TINY, seeds=[0])
    paths = write_ablation_report(reports, tmp_path)
    document = json.loads(paths["doc"].read_text(encoding="utf-8"))
    assert document["kind"] == "ablation-report"
    assert len(document["runs"]) == len(AblationStrategy)
    ranking = document["ranking"]
    assert set(ranking["strategies"]) == {s.value for s in AblationStrategy}
    table_lines = paths["table"].read_text(encoding="utf-8").splitlines()
    assert len(table_lines) == len(AblationStrategy) + 1


def test_ablation_ranking_deltas(demo_catalog):
    reports = run_ablation_matrix(demo_catalog, TINY, seeds=[0])
    ranking = ablation_ranking(reports)
    full = ranking["strategies"]["FullFramework"]
    assert full["les_delta_vs_full"] == 0.0
    assert full["krr_delta_vs_full"] == 0.0
    for label, entry in ranking["strategies"].items():
        assert entry["les_delta_vs_full"] == entry["mean_les"] - full["mean_les"]
    assert ranking["ranked_by_les"][0] == max(
        ranking["strategies"], key=lambda s: ranking["strategies"][s]["mean_les"]
    )
