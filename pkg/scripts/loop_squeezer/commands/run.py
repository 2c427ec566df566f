"""Run command for loop-squeezer."""

import sys
from typing import Any, Dict, List, Tuple

from loop_squeezer.commands.common import echo_warnings, load_for_command, out_dir_for
from loop_squeezer.errors import LoopSqueezerError
from loop_squeezer.output import RunProgress, clock_line, print_table, status
from loop_squeezer.runner import run_experiment


def _work_items(config: Dict[str, Any]) -> Tuple[int, str]:
    experiment = config["experiment"]
    if experiment == "programs":
        return len(config["programs"]), "programs"
    if experiment == "negativity_curves":
        return len(config["negativity_curves"]["scenarios"]), "scenarios"
    return len(config["scalability"]["r_values"]), "r values"


def _summary(report: Dict[str, Any]) -> None:
    experiment = report["experiment"]
    if experiment == "programs":
        headers = ["program", "F_ideal", "W(0,0)", "Var x/in", "Var p/in"]
        rows: List[List[Any]] = [
            [p["label"], p.get("fidelity_ideal_theory"), p["w00"], p["var_x_ratio"], p["var_p_ratio"]]
            for p in report["programs"]
        ]
    elif experiment == "negativity_curves":
        headers = ["scenario", "W(0,0) final", "last negative step"]
        rows = [[c["scenario"], c["w00"][-1], c["last_negative_step"]] for c in report["curves"]]
    else:
        headers = ["r", "dB", "max steps"]
        rows = [[r["r"], r["squeezing_db"], r["max_steps"]] for r in report["rows"]]
    print()
    print_table(headers, rows)


def cmd_run(args: Any) -> None:
    """Run an experiment config and write its report."""
    config = load_for_command(args)
    out_dir = out_dir_for(args, config)
    print(status(f"Running {config['name']} ({config['experiment']}, engine {config['engine']})"))

    progress = RunProgress(*_work_items(config))
    try:
        report = run_experiment(config, out_dir, progress=progress.advance)
    except LoopSqueezerError as e:
        progress.close()
        print(status(f"Run failed: {e}", "fail"))
        sys.exit(1)
    progress.close()

    _summary(report)
    if report["warnings"]:
        print(f"\n{len(report['warnings'])} warning(s):")
        echo_warnings(report["warnings"])
    print()
    print(clock_line(report["timing"]))
    print(status(f"Report written to {out_dir / 'report.json'}", "ok"))
