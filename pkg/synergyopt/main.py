"""synergyopt command-line entrypoint."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from synergyopt.config.logging import setup_logging
from synergyopt.config.settings import get_settings
from synergyopt.exceptions import ConfigError
from synergyopt.pipeline import COMMANDS, RunConfig, run_command
from synergyopt.types import ExitCode


def _r_star_pair(text: str) -> tuple[str, float]:
    key, sep, value = text.partition("=")
    if not sep or not key:
        msg = f"expected KEY=MM, got {text!r}"
        raise argparse.ArgumentTypeError(msg)
    try:
        return key, float(value)
    except ValueError as e:
        msg = f"moment arm for {key!r} is not a number: {value!r}"
        raise argparse.ArgumentTypeError(msg) from e


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="synergyopt",
        description="Optimize tendon moment arms, spring stiffnesses and preloads of an "
        "underactuated hand against a set of desired grasps.",
    )
    parser.add_argument("command", choices=list(COMMANDS))
    parser.add_argument("--hand", type=Path, help="Hand description (JSON or YAML).")
    parser.add_argument("--grasps", type=Path, help="Grasp set (JSON or YAML).")
    parser.add_argument("--force-grid", type=Path, help="Moment-arm grid.")
    parser.add_argument("--kin-grid", type=Path, help="Stiffness and preload grid.")
    parser.add_argument("--out", type=Path, default=Path("out"), help="Output directory.")
    parser.add_argument("--trace", action="store_true", help="Write every combination's Q.")
    parser.add_argument(
        "--threads", type=int, help="Worker processes, 0 = one per CPU (env SYNERGY_THREADS)."
    )
    parser.add_argument("--open-pose-weight", type=float, help="Weight of the fully open pose.")
    parser.add_argument("--qp-tol", type=float, help="KKT tolerance of the grasp QP.")
    parser.add_argument("--edges", type=int, help="Default friction pyramid edge count.")
    parser.add_argument(
        "--skip-validate", action="store_true", help="Skip the force-closure check."
    )
    parser.add_argument(
        "--r-star",
        type=_r_star_pair,
        action="append",
        default=[],
        metavar="KEY=MM",
        help="Moment arm for the kinematic phase (repeatable); replaces force_report.json.",
    )
    parser.add_argument(
        "--no-decompose", action="store_true", help="Search the whole hand at once."
    )
    parser.add_argument(
        "--whole-hand-pca", action="store_true", help="Also report whole-hand components."
    )
    parser.add_argument("--log-level", help="Logging level (env SYNERGY_LOG_LEVEL).")
    parser.add_argument("--json-logs", action="store_true", help="Render logs as JSON.")
    return parser


def cli(argv: list[str] | None = None) -> int:
    """CLI entrypoint."""
    args = build_parser().parse_args(argv)
    settings = get_settings()
    setup_logging(args.log_level or settings.log_level, args.json_logs or settings.json_logs)
    try:
        config = RunConfig.from_settings(
            settings,
            hand_path=args.hand,
            grasps_path=args.grasps,
            force_grid_path=args.force_grid,
            kin_grid_path=args.kin_grid,
            output_dir=args.out,
            trace=args.trace,
            threads=args.threads,
            open_pose_weight=args.open_pose_weight,
            qp_tol=args.qp_tol,
            edges_default=args.edges,
            skip_validate=args.skip_validate,
            r_star_mm=dict(args.r_star),
            decompose=not args.no_decompose,
            whole_hand_pca=args.whole_hand_pca,
        )
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return ExitCode.PARSE
    return run_command(args.command, config)


if __name__ == "__main__":
    sys.exit(cli())
