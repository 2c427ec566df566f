"""Fit-mode command for loop-squeezer."""

import sys
from typing import Any

from loop_squeezer.commands.common import echo_warnings, load_for_command, out_dir_for
from loop_squeezer.errors import LoopSqueezerError
from loop_squeezer.output import print_table, status
from loop_squeezer.runner import run_mode_fit


def cmd_fit_mode(args: Any) -> None:
    """Recover the temporal mode from synthetic heralded homodyne windows."""
    config = load_for_command(args, default="mode_fit")
    out_dir = out_dir_for(args, config)
    t = config["temporal"]
    print(status(f"Synthesizing {t['windows']} windows, fitting the temporal mode..."))
    try:
        report = run_mode_fit(config, out_dir)
    except LoopSqueezerError as e:
        print(status(f"Mode fit failed: {e}", "fail"))
        sys.exit(1)

    true_mode, fit = report["true_mode"], report["fit"]
    rows = [
        [key, true_mode[key], fit[key]]
        for key in ("gamma1_mhz", "gamma2_mhz", "t0_ns")
    ]
    print_table(["parameter", "true", "fitted"], rows, digits=3)
    print(f"\nVariance {fit['variance']:.4f} (embedded {report['embedded_variance']})")
    if not fit["identifiable"]:
        print(status("Fitted maximum is within sampling noise of vacuum: mode not identifiable", "warn"))
    echo_warnings(report["warnings"])
    print(status(f"Fit written to {out_dir / 'report.json'}", "ok"))
