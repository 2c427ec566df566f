"""Helpers shared by the loop-squeezer commands."""

import sys
from pathlib import Path
from typing import Any, Dict, List

from loop_squeezer.config import apply_overrides, load_experiment_config, validate_config
from loop_squeezer.errors import ConfigError
from loop_squeezer.output import status


def exit_config_error(e: ConfigError) -> None:
    print(status("Invalid config:", "fail"))
    for problem in e.problems:
        print(status(f"  - {problem}", "fail"))
    sys.exit(2)


def load_for_command(args: Any, default: str = "table1_vacuum") -> Dict[str, Any]:
    """Load, override and validate the config named on the command line; exit 2 on errors."""
    try:
        config = load_experiment_config(getattr(args, "config", None) or default)
        config = apply_overrides(config, getattr(args, "seed", None), getattr(args, "cutoff", None))
        return validate_config(config)
    except ConfigError as e:
        exit_config_error(e)
        raise


def out_dir_for(args: Any, config: Dict[str, Any]) -> Path:
    out = getattr(args, "out", None)
    return Path(out) if out else Path("results") / config["name"]


def echo_warnings(messages: List[str]) -> None:
    for message in messages:
        print(status(f"  ! {message}", "warn"))
