"""Operator command line: simulate, ablate, serve, report.

Exit codes follow the usual convention: 0 on success, 1 on a runtime
failure (bad catalog, missing input file), 2 on a usage error (argparse
raises those itself via bad flag values).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .analytics import TrainerConfig
from .catalog import load_catalog, load_demo_catalog
from .errors import EngineError
from .model import FusionConfig
from .pathways import RewardConfig
from .provider import ProviderConfig, load_provider_config
from .simulate import (
    AblationStrategy,
    SimConfig,
    ablation_ranking,
    render_table,
    run_ablation_matrix,
    run_session,
    session_report_document,
    write_ablation_report,
    write_session_report,
)

# Published scores from an external LLM-tutoring study, printed only behind
# --reference and explicitly labeled: this implementation cannot and does not
# try to reproduce them.
REFERENCE_LABEL = "paper (not reproducible)"

REFERENCE_COMPARISON = (
    ("Llama-3-7b", "AdaLED", "Low-Resource Language", 75.5, 80.2),
    ("Llama-3-7b", "Dither-and-Learning", "MCScript", 78.0, 82.5),
    ("Llama-3-7b", "ALPACA", "Families in Wild", 80.1, 85.0),
    ("Llama-3-7b", "Retentive Decision Transformer", "ETHICS", 82.3, 83.8),
    ("Llama-3-7b", "Adaptive Event-triggered RL", "Simulated Annotated", 79.5, 81.0),
    ("GPT-4", "AdaLED", "Low-Resource Language", 80.5, 84.2),
    ("GPT-4", "Dither-and-Learning", "MCScript", 82.0, 86.1),
    ("GPT-4", "ALPACA", "Families in Wild", 84.3, 87.5),
    ("GPT-4", "Retentive Decision Transformer", "ETHICS", 83.7, 85.5),
    ("GPT-4", "Adaptive Event-triggered RL", "Simulated Annotated", 81.2, 82.7),
)

REFERENCE_ABLATIONS = (
    ("Llama-3-7b", "No Real-Time Adjustment", "Low-Resource Language", 70.2, 76.5),
    ("Llama-3-7b", "No Personalized Recommendations", "MCScript", 76.4, 80.1),
    ("Llama-3-7b", "Fixed Learning Path", "Families in Wild", 77.3, 81.8),
    ("Llama-3-7b", "Basic Assessment Only", "ETHICS", 78.5, 82.3),
    ("Llama-3-7b", "Static Resource Allocation", "Simulated Annotated", 75.0, 78.4),
    ("GPT-4", "No Real-Time Adjustment", "Low-Resource Language", 74.5, 79.8),
    ("GPT-4", "No Personalized Recommendations", "MCScript", 79.2, 83.9),
    ("GPT-4", "Fixed Learning Path", "Families in Wild", 80.0, 85.0),
    ("GPT-4", "Basic Assessment Only", "ETHICS", 81.0, 84.0),
    ("GPT-4", "Static Resource Allocation", "Simulated Annotated", 76.8, 80.5),
)


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from exc
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _nonneg_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from exc
    if value < 0.0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _seed_list(text: str) -> list[int]:
    try:
        seeds = [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"{text!r} is not a comma list of integers") from exc
    if not seeds:
        raise argparse.ArgumentTypeError("at least one seed is required")
    return seeds


def _strategy(text: str) -> AblationStrategy:
    try:
        return AblationStrategy.parse(text)
    except EngineError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _load_catalog_arg(spec: str):
    if spec == "demo":
        return load_demo_catalog()
    return load_catalog(spec)


def _reward_config(args: argparse.Namespace) -> RewardConfig:
    config = RewardConfig()
    if getattr(args, "beta", None) is not None or getattr(args, "gamma", None) is not None:
        beta = args.beta if args.beta is not None else config.engagement_weight
        gamma = args.gamma if args.gamma is not None else config.quality_weight
        config = RewardConfig(
            engagement_weight=beta,
            quality_weight=gamma,
            horizon=config.horizon,
            beam_width=config.beam_width,
        )
    return config


def _add_shared_flags(parser: argparse.ArgumentParser, *, seeds: bool = False) -> None:
    parser.add_argument("--catalog", default="demo", help="catalog JSON path, or 'demo'")
    if seeds:
        parser.add_argument("--seeds", type=_seed_list, default=[0, 1, 2], help="comma list")
    else:
        parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--cohort", type=_positive_int, default=200)
    parser.add_argument("--episodes", type=_positive_int, default=50)
    parser.add_argument("--beta", type=_nonneg_float, default=None, help="engagement weight")
    parser.add_argument("--gamma", type=_nonneg_float, default=None, help="quality weight")
    parser.add_argument("--out", default="reports", help="output directory")
    parser.add_argument("--format", choices=("table", "doc"), default="table")


def cmd_simulate(args: argparse.Namespace) -> int:
    catalog = _load_catalog_arg(args.catalog)
    config = SimConfig(
        seed=args.seed,
        cohort_size=args.cohort,
        episodes=args.episodes,
        strategy=args.strategy,
    )
    report = run_session(catalog, config, _reward_config(args), FusionConfig(), TrainerConfig())
    paths = write_session_report(report, args.out)
    if args.format == "doc":
        print(json.dumps(session_report_document(report), indent=2, sort_keys=True))
    else:
        print(render_table([report]), end="")
        print(
            f"# {report.interactions} interactions; "
            f"LES {report.mean_les:.2f} (sd {report.sd_les:.2f}), "
            f"KRR {report.mean_krr:.2f} (sd {report.sd_krr:.2f})"
        )
    print(f"# wrote {paths['doc']} and {paths['table']}", file=sys.stderr)
    return 0


def cmd_ablate(args: argparse.Namespace) -> int:
    catalog = _load_catalog_arg(args.catalog)
    base = SimConfig(seed=0, cohort_size=args.cohort, episodes=args.episodes)
    reports = run_ablation_matrix(
        catalog,
        base,
        args.seeds,
        reward_config=_reward_config(args),
        workers=args.workers,
    )
    paths = write_ablation_report(reports, args.out)
    ranking = ablation_ranking(reports)
    if args.format == "doc":
        print(json.dumps(ranking, indent=2, sort_keys=True))
    else:
        print(render_table(reports), end="")
        best = ranking["ranked_by_les"][0]
        print(f"# best mean LES: {best}")
        for strategy in ranking["ranked_by_les"]:
            entry = ranking["strategies"][strategy]
            delta = entry.get("les_delta_vs_full")
            suffix = "" if delta is None else f" (LES delta vs full {delta:+.2f})"
            print(f"#   {strategy}: LES {entry['mean_les']:.2f}, KRR {entry['mean_krr']:.2f}{suffix}")
    print(f"# wrote {paths['doc']} and {paths['table']}", file=sys.stderr)
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    catalog = _load_catalog_arg(args.catalog)
    provider = ProviderConfig()
    if args.provider_config is not None:
        provider = load_provider_config(args.provider_config)
    app = create_app(catalog, data_dir=args.data_dir, provider_config=provider)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _read_report_table(path: Path, expected_columns: int | None) -> tuple[list[str], list[list[str]]]:
    if not path.exists():
        raise EngineError(f"report file not found: {path}")
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise EngineError(f"report file is empty: {path}")
    header = lines[0].split("\t")
    if expected_columns is not None and len(header) != expected_columns:
        raise EngineError(
            f"report file {path} has {len(header)} columns, expected {expected_columns}"
        )
    rows = [line.split("\t") for line in lines[1:] if line]
    for row in rows:
        if len(row) != len(header):
            raise EngineError(f"report file {path} has a ragged row: {row!r}")
    return header, rows


def _aligned(rows: list[list[str]]) -> str:
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    out_lines = []
    for row in rows:
        out_lines.append("  ".join(cell.ljust(width) for cell, width in zip(row, widths)))
    return "\n".join(out_lines) + "\n"


def cmd_report(args: argparse.Namespace) -> int:
    header: list[str] | None = None
    merged: list[list[str]] = []
    for spec in args.inputs:
        path = Path(spec)
        file_header, rows = _read_report_table(path, len(header) if header else None)
        if header is None:
            header = file_header
        elif file_header != header:
            raise EngineError(f"report file {path} header does not match {args.inputs[0]}")
        merged.extend(rows)

    assert header is not None
    if args.format == "doc":
        document: dict = {
            "kind": "merged-report",
            "columns": header,
            "rows": merged,
        }
        if args.reference:
            document["reference"] = {
                "label": REFERENCE_LABEL,
                "comparison": [list(row) for row in REFERENCE_COMPARISON],
                "ablations": [list(row) for row in REFERENCE_ABLATIONS],
            }
        print(json.dumps(document, indent=2, sort_keys=True))
        return 0

    print(_aligned([header] + merged), end="")
    if args.reference:
        print()
        print(f"reference values, {REFERENCE_LABEL}:")
        ref_rows = [["model", "strategy", "dataset", "LES", "KRR", "label"]]
        for model, strategy, dataset, les_value, krr_value in (
            REFERENCE_COMPARISON + REFERENCE_ABLATIONS
        ):
            ref_rows.append(
                [model, strategy, dataset, f"{les_value:.1f}", f"{krr_value:.1f}", REFERENCE_LABEL]
            )
        print(_aligned(ref_rows), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adaptive-curriculum",
        description="Adaptive curriculum engine: simulations, ablations, API service, reports.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one cohort simulation")
    _add_shared_flags(p_sim)
    p_sim.add_argument("--strategy", type=_strategy, default=AblationStrategy.FULL_FRAMEWORK)
    p_sim.set_defaults(func=cmd_simulate)

    p_abl = sub.add_parser("ablate", help="run the full strategy x seed matrix")
    _add_shared_flags(p_abl, seeds=True)
    p_abl.add_argument("--workers", type=_positive_int, default=1)
    p_abl.set_defaults(func=cmd_ablate)

    p_srv = sub.add_parser("serve", help="serve the session API")
    p_srv.add_argument("--catalog", default="demo", help="catalog JSON path, or 'demo'")
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.add_argument("--port", type=int, default=8000)
    p_srv.add_argument("--data-dir", default="data/sessions")
    p_srv.add_argument("--provider-config", default=None, help="provider settings JSON")
    p_srv.set_defaults(func=cmd_serve)

    p_rep = sub.add_parser("report", help="merge and render report tables")
    p_rep.add_argument("inputs", nargs="+", help="report .tsv files")
    p_rep.add_argument("--reference", action="store_true", help="append published scores")
    p_rep.add_argument("--format", choices=("table", "doc"), default="table")
    p_rep.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
