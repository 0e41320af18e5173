import json
import subprocess
import sys

import pytest

from adaptive_curriculum.cli import REFERENCE_LABEL, main


def _simulate(tmp_path, *extra):
    argv = [
        "simulate",
        "--seed",
        "5",
        "--cohort",
        "3",
        "--episodes",
        "6",
        "--out",
        str(tmp_path),
        *extra,
    ]
    return main(argv)


def test_simulate_writes_reports_and_prints_table(tmp_path, capsys):
    assert _simulate(tmp_path) == 0
    captured = capsys.readouterr()
    lines = captured.out.splitlines()
    assert lines[0].startswith("strategy\tseed\tmean_les")
    assert lines[1].startswith("FullFramework\t5\t")
    assert "# 18 interactions; LES" in captured.out
    assert "# wrote" in captured.err
    assert (tmp_path / "session.json").exists()
    assert (tmp_path / "session.tsv").exists()


def test_simulate_reruns_byte_identical(tmp_path, capsys):
    assert _simulate(tmp_path) == 0
    first = {
        name: (tmp_path / name).read_bytes() for name in ("session.json", "session.tsv")
    }
    assert _simulate(tmp_path) == 0
    second = {
        name: (tmp_path / name).read_bytes() for name in ("session.json", "session.tsv")
    }
    capsys.readouterr()
    assert first == second


def test_simulate_doc_format(tmp_path, capsys):
    assert _simulate(tmp_path, "--format", "doc") == 0
    document = json.loads(capsys.readouterr().out)
    assert document["kind"] == "session-report"
    assert document["seed"] == 5
    assert document["protocol"]["interactions"] == 18


def test_simulate_strategy_flag(tmp_path, capsys):
    assert _simulate(tmp_path, "--strategy", "Basic Assessment Only") == 0
    assert capsys.readouterr().out.splitlines()[1].startswith("Basic Assessment Only\t")


def test_simulate_rejects_unknown_strategy(tmp_path, capsys):
    with pytest.raises(SystemExit) as excinfo:
        _simulate(tmp_path, "--strategy", "Psychic Tutoring")
    assert excinfo.value.code == 2
    assert "unknown strategy" in capsys.readouterr().err


def test_usage_errors_exit_two(tmp_path, capsys):
    for argv in (
        ["simulate", "--cohort", "0"],
        ["simulate", "--episodes", "-3"],
        ["simulate", "--beta", "-0.5"],
        ["ablate", "--seeds", ""],
        ["nonsense"],
    ):
        with pytest.raises(SystemExit) as excinfo:
            main(argv)
        assert excinfo.value.code == 2
    capsys.readouterr()


def test_missing_catalog_is_a_runtime_error(tmp_path, capsys):
    code = _simulate(tmp_path, "--catalog", str(tmp_path / "nope.json"))
    assert code == 1
    assert capsys.readouterr().err.startswith("error:")


def test_ablate_writes_matrix_and_ranking(tmp_path, capsys):
    code = main(
        [
            "ablate",
            "--seeds",
            "0,1",
            "--cohort",
            "2",
            "--episodes",
            "4",
            "--out",
            str(tmp_path),
        ]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "# best mean LES:" in out
    assert out.count("FullFramework") >= 2
    document = json.loads((tmp_path / "ablation.json").read_text(encoding="utf-8"))
    assert document["kind"] == "ablation-report"
    assert len(document["runs"]) == 12
    table_lines = (tmp_path / "ablation.tsv").read_text(encoding="utf-8").splitlines()
    assert len(table_lines) == 13


def test_ablate_doc_format(tmp_path, capsys):
    code = main(
        [
            "ablate",
            "--seeds",
            "0",
            "--cohort",
            "2",
            "--episodes",
            "4",
            "--out",
            str(tmp_path),
            "--format",
            "doc",
        ]
    )
    assert code == 0
    ranking = json.loads(capsys.readouterr().out)
    assert "FullFramework" in ranking["strategies"]
    assert len(ranking["ranked_by_les"]) == 6


def test_report_merges_tables(tmp_path, capsys):
    first_dir = tmp_path / "one"
    second_dir = tmp_path / "two"
    assert _simulate(first_dir) == 0
    assert _simulate(second_dir, "--strategy", "Fixed Learning Path") == 0
    capsys.readouterr()

    code = main(["report", str(first_dir / "session.tsv"), str(second_dir / "session.tsv")])
    assert code == 0
    out = capsys.readouterr().out
    lines = out.splitlines()
    assert lines[0].startswith("strategy")
    assert sum(1 for line in lines if line.startswith("strategy")) == 1
    assert any(line.startswith("FullFramework") for line in lines)
    assert any(line.startswith("Fixed Learning Path") for line in lines)


def test_report_reference_rows_are_labeled(tmp_path, capsys):
    report_dir = tmp_path / "run"
    assert _simulate(report_dir) == 0
    capsys.readouterr()

    code = main(["report", str(report_dir / "session.tsv"), "--reference"])
    assert code == 0
    out = capsys.readouterr().out
    assert f"reference values, {REFERENCE_LABEL}:" in out
    labeled = [line for line in out.splitlines() if REFERENCE_LABEL in line]
    # header mention plus 20 reference rows, each explicitly tagged
    assert len(labeled) >= 21
    assert "75.5" in out

    code = main(["report", str(report_dir / "session.tsv"), "--reference", "--format", "doc"])
    assert code == 0
    document = json.loads(capsys.readouterr().out)
    assert document["kind"] == "merged-report"
    assert document["reference"]["label"] == REFERENCE_LABEL
    assert len(document["reference"]["comparison"]) == 10
    assert len(document["reference"]["ablations"]) == 10


def test_report_input_errors(tmp_path, capsys):
    good_dir = tmp_path / "good"
    assert _simulate(good_dir) == 0
    good = good_dir / "session.tsv"
    capsys.readouterr()

    missing = tmp_path / "missing.tsv"
    assert main(["report", str(missing)]) == 1
    assert "not found" in capsys.readouterr().err

    empty = tmp_path / "empty.tsv"
    empty.write_text("", encoding="utf-8")
    assert main(["report", str(empty)]) == 1
    assert "empty" in capsys.readouterr().err

    narrow = tmp_path / "narrow.tsv"
    narrow.write_text("a\tb\nx\ty\n", encoding="utf-8")
    assert main(["report", str(good), str(narrow)]) == 1
    err = capsys.readouterr().err
    assert "narrow.tsv" in err and "columns" in err

    ragged = tmp_path / "ragged.tsv"
    header = good.read_text(encoding="utf-8").splitlines()[0]
    ragged.write_text(header + "\nonly\ttwo\n", encoding="utf-8")
    assert main(["report", str(ragged)]) == 1
    assert "ragged" in capsys.readouterr().err

    renamed = tmp_path / "renamed.tsv"
    renamed.write_text(
        good.read_text(encoding="utf-8").replace("mean_les", "avg_les", 1), encoding="utf-8"
    )
    assert main(["report", str(good), str(renamed)]) == 1
    assert "does not match" in capsys.readouterr().err


def test_console_script_help_runs():
    result = subprocess.run(
        [sys.executable, "-m", "adaptive_curriculum.cli", "--help"],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0
    assert "simulate" in result.stdout and "serve" in result.stdout
