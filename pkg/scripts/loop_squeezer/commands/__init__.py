"""Command implementations for loop-squeezer."""

from loop_squeezer.commands.fit_mode import cmd_fit_mode
from loop_squeezer.commands.run import cmd_run
from loop_squeezer.commands.schedule import cmd_schedule
from loop_squeezer.commands.sweep import cmd_sweep

__all__ = [
    "cmd_run",
    "cmd_sweep",
    "cmd_schedule",
    "cmd_fit_mode",
]
