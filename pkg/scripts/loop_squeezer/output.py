"""Console reporting for loop-squeezer: status lines, run progress and metric tables."""

import os
import sys
import time
from typing import Any, Dict, List, Sequence

# ANSI SGR codes per status level
LEVELS = {"ok": "32", "note": "34", "warn": "33", "fail": "31"}

_color = True


def _on_terminal() -> bool:
    return hasattr(sys.stdout, "isatty") and sys.stdout.isatty()


def use_color(no_color_flag: bool = False) -> bool:
    """Decide once per process whether status lines are colored."""
    global _color
    _color = not no_color_flag and not os.environ.get("NO_COLOR") and _on_terminal()
    return _color


def status(msg: str, level: str = "note") -> str:
    """msg styled for its level (ok, note, warn, fail)."""
    if level not in LEVELS:
        raise ValueError(f"unknown status level {level!r}; expected one of {', '.join(LEVELS)}")
    if not _color:
        return msg
    return f"\033[{LEVELS[level]}m{msg}\033[0m"


class RunProgress:
    """Counts finished work items (programs, scenarios, r values, sweep points).

    On a terminal the count is redrawn in place; elsewhere only the closing summary
    line is printed.
    """

    def __init__(self, total: int, unit: str) -> None:
        self.total = total
        self.unit = unit
        self.done = 0
        self._started = time.monotonic()
        self._live = _on_terminal()

    def advance(self) -> None:
        self.done += 1
        if self._live:
            sys.stdout.write(f"\r   {self.unit} {self.done}/{self.total}")
            sys.stdout.flush()

    def close(self) -> None:
        elapsed = time.monotonic() - self._started
        if self._live:
            sys.stdout.write("\r")
        print(f"   {self.done}/{self.total} {self.unit} in {elapsed:.1f} s")


def clock_line(timing: Dict[str, Any]) -> str:
    """One-line verdict on the loop clock, styled ok or warn."""
    verdict = "feasible" if timing["feasible"] else f"infeasible, short by {timing['deficit_ns']:.4g} ns"
    line = f"Clock: {timing['clock_mhz']:.2f} MHz ({verdict})"
    return status(line, "ok" if timing["feasible"] else "warn")


def format_value(value: Any, digits: int = 4) -> str:
    """Format a metric for console tables; None and NaN print as '-'."""
    if value is None:
        return "-"
    if isinstance(value, float):
        if value != value:
            return "-"
        return f"{value:.{digits}f}"
    return str(value)


def print_table(headers: Sequence[str], rows: List[Sequence[Any]], digits: int = 4) -> None:
    """Print rows as a left-aligned console table."""
    cells = [[format_value(v, digits) for v in row] for row in rows]
    widths = [len(h) for h in headers]
    for row in cells:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    print("  ".join(h.ljust(w) for h, w in zip(headers, widths)))
    print("  ".join("-" * w for w in widths))
    for row in cells:
        print("  ".join(c.ljust(w) for c, w in zip(row, widths)))
