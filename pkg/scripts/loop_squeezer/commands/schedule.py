"""Schedule command for loop-squeezer."""

from typing import Any

from loop_squeezer.commands.common import load_for_command, out_dir_for
from loop_squeezer.output import clock_line, print_table, status
from loop_squeezer.runner import run_schedule


def cmd_schedule(args: Any) -> None:
    """Compile the configured programs into control timelines."""
    config = load_for_command(args)
    out_dir = out_dir_for(args, config)
    report = run_schedule(config, out_dir)

    for k, schedule in enumerate(report["schedules"]):
        print(status(f"\nProgram {k}: {schedule['label'] or '(unlabelled)'}  tau = {schedule['tau_ns']} ns"))
        rows = [
            [e["bin"], e["time_ns"], e["vbs_reflectivity"], e["switch"], e["pulse"], e["hd_basis_deg"]]
            for e in schedule["entries"]
        ]
        print_table(["bin", "t (ns)", "VBS R", "switch", "pulse", "HD (deg)"], rows, digits=2)

    timing = report["timing"]
    print()
    print(clock_line(timing))
    print(f"Each bin needs {timing['required_ns']:.4g} ns (max clock {timing['max_clock_mhz']:.2f} MHz)")
    print(status(f"Schedules written to {out_dir}", "ok"))
