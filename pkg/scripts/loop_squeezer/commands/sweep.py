"""Sweep command for loop-squeezer."""

import json
import sys
from pathlib import Path
from typing import Any, List

from loop_squeezer.commands.common import exit_config_error, load_for_command, out_dir_for
from loop_squeezer.errors import ConfigError, LoopSqueezerError
from loop_squeezer.fs import ensure_out_dir
from loop_squeezer.output import RunProgress, status
from loop_squeezer.runner import sweep


def parse_values(raw: List[str]) -> List[Any]:
    """Each value as JSON when it parses (numbers, lists), else as a plain string."""
    values = []
    for item in raw:
        try:
            values.append(json.loads(item))
        except json.JSONDecodeError:
            values.append(item)
    return values


def cmd_sweep(args: Any) -> None:
    """Vary one config parameter and tabulate the metrics per value."""
    config = load_for_command(args)
    values = parse_values(args.values or [])
    out_dir = ensure_out_dir(out_dir_for(args, config))
    out_path = Path(out_dir) / f"sweep_{args.param.replace('.', '_')}.csv"
    print(status(f"Sweeping {args.param} over {len(values)} value(s)"))

    progress = RunProgress(len(values), "values")
    try:
        rows = sweep(config, args.param, values, out_path, progress=progress.advance)
    except ConfigError as e:
        progress.close()
        exit_config_error(e)
        return
    except LoopSqueezerError as e:
        progress.close()
        print(status(f"Sweep failed: {e}", "fail"))
        sys.exit(1)
    progress.close()
    print(status(f"{len(rows)} row(s) written to {out_path}", "ok"))
