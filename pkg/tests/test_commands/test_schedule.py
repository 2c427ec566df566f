"""Tests for the schedule command."""

import json
from pathlib import Path
from typing import Any

import pytest


class MockArgs:
    """Mock args object for command functions."""

    def __init__(self, **kwargs: Any) -> None:
        for key, value in kwargs.items():
            setattr(self, key, value)


class TestCmdSchedule:
    """Tests for cmd_schedule function."""

    def test_schedule_bundled(self, temp_dir: Path, capsys: Any) -> None:
        """Test compiling the three-step programs prints both timelines."""
        from loop_squeezer.commands.schedule import cmd_schedule

        cmd_schedule(MockArgs(config="table2_vacuum", out=str(temp_dir / "out"), seed=None, cutoff=None))

        captured = capsys.readouterr()
        assert "Program 0: x chain" in captured.out
        assert "Program 1: p chain" in captured.out
        assert "to_dump" in captured.out
        assert "Clock: 16.45 MHz (feasible)" in captured.out
        assert "Schedules written to" in captured.out
        assert (temp_dir / "out" / "program1_schedule.csv").exists()
        report = json.loads((temp_dir / "out" / "report.json").read_text())
        assert len(report["schedules"]) == 2

    def test_schedule_infeasible(self, temp_dir: Path, capsys: Any) -> None:
        """Test that a short loop is reported with its deficit."""
        path = temp_dir / "short.json"
        path.write_text(json.dumps({"name": "short", "programs": [{"r": [0.3]}], "timing": {"tau_ns": 40.0}}))

        from loop_squeezer.commands.schedule import cmd_schedule

        cmd_schedule(MockArgs(config=str(path), out=str(temp_dir / "out"), seed=None, cutoff=None))

        assert "short by 10 ns" in capsys.readouterr().out

    def test_schedule_invalid_config(self, temp_dir: Path, capsys: Any) -> None:
        """Test that an invalid config exits with status 2."""
        path = temp_dir / "bad.json"
        path.write_text(json.dumps({"programs": []}))

        from loop_squeezer.commands.schedule import cmd_schedule

        with pytest.raises(SystemExit) as exc:
            cmd_schedule(MockArgs(config=str(path), out=None, seed=None, cutoff=None))

        assert exc.value.code == 2
        assert "at least one program" in capsys.readouterr().out
