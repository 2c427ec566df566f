"""Main CLI entry point for loop-squeezer."""

import argparse
import sys

from loop_squeezer.commands import cmd_fit_mode, cmd_run, cmd_schedule, cmd_sweep
from loop_squeezer.constants import VERSION
from loop_squeezer.output import use_color


def _add_common(parser: argparse.ArgumentParser, default_config: str) -> None:
    parser.add_argument(
        "--config",
        "-c",
        default=default_config,
        help=f"Config file path or bundled config name (default: {default_config})",
    )
    parser.add_argument("--out", "-o", help="Output directory (default: results/<name>)")
    parser.add_argument("--seed", type=int, help="Override the tomography and synthesis seeds")
    parser.add_argument("--cutoff", type=int, help="Override the Fock cutoff")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="loop-squeezer",
        description="Loop-based measurement-induced squeezing simulator",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  loop-squeezer run -c table1_vacuum              # Single-step gates on vacuum
  loop-squeezer run -c table2_cat --cutoff 90     # Three-step programs on a cat
  loop-squeezer run -c appendixD_iterations       # Step counts keeping W(0,0) < 0
  loop-squeezer sweep -c table2_vacuum -p programs.0.n_steps -v 1 2 3
  loop-squeezer schedule -c table2_vacuum         # Control timeline per program
  loop-squeezer fit-mode --seed 3                 # Temporal mode recovery
""",
    )

    parser.add_argument("--version", "-V", action="version", version=f"loop-squeezer {VERSION}")
    parser.add_argument("--no-color", action="store_true", help="Disable colored output")

    subparsers = parser.add_subparsers(dest="command", help="Commands")

    # run
    p_run = subparsers.add_parser("run", help="Run an experiment config")
    _add_common(p_run, "table1_vacuum")

    # sweep
    p_sweep = subparsers.add_parser("sweep", help="Vary one config parameter")
    _add_common(p_sweep, "table1_vacuum")
    p_sweep.add_argument(
        "--param", "-p", required=True, help="Dotted config path, e.g. programs.0.r.0 or cutoff"
    )
    p_sweep.add_argument("--values", "-v", nargs="*", default=[], help="Values (parsed as JSON)")

    # schedule
    p_schedule = subparsers.add_parser("schedule", help="Compile programs into control schedules")
    _add_common(p_schedule, "table2_vacuum")

    # fit-mode
    p_fit = subparsers.add_parser("fit-mode", help="Fit the temporal mode to synthetic windows")
    _add_common(p_fit, "mode_fit")

    return parser


def main() -> None:
    parser = build_parser()
    args = parser.parse_args()

    use_color(args.no_color)

    if not args.command:
        parser.print_help()
        sys.exit(1)

    commands = {
        "run": cmd_run,
        "sweep": cmd_sweep,
        "schedule": cmd_schedule,
        "fit-mode": cmd_fit_mode,
    }
    commands[args.command](args)


if __name__ == "__main__":
    main()
