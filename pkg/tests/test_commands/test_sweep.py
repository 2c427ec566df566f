"""Tests for the sweep command."""

import json
from pathlib import Path
from typing import Any, Dict
from unittest.mock import patch

import pytest

from loop_squeezer.commands.sweep import parse_values
from loop_squeezer.errors import ConfigError, LoopSqueezerError
from loop_squeezer.fs import read_csv_rows


class MockArgs:
    """Mock args object for command functions."""

    def __init__(self, **kwargs: Any) -> None:
        for key, value in kwargs.items():
            setattr(self, key, value)


def _args(temp_dir: Path, **kwargs: Any) -> MockArgs:
    defaults = dict(
        config="table1_vacuum",
        out=str(temp_dir / "out"),
        seed=None,
        cutoff=None,
        param="programs.0.steps.0.g",
        values=["-0.7", "-0.82"],
    )
    defaults.update(kwargs)
    return MockArgs(**defaults)


class TestParseValues:
    """Tests for parse_values."""

    def test_json_values(self) -> None:
        """Numbers and lists parse as JSON."""
        assert parse_values(["1", "0.5", "[0.33, 0.14]", "true"]) == [1, 0.5, [0.33, 0.14], True]

    def test_plain_strings(self) -> None:
        """Anything else stays a string."""
        assert parse_values(["current", "phase_space"]) == ["current", "phase_space"]

    def test_empty(self) -> None:
        """No values, no runs."""
        assert parse_values([]) == []


class TestCmdSweep:
    """Tests for cmd_sweep function."""

    def test_sweep_success(self, temp_dir: Path, capsys: Any) -> None:
        """Test a sweep reports its row count and CSV path."""
        with patch("loop_squeezer.commands.sweep.sweep", return_value=[{}, {}]) as mock_sweep:
            from loop_squeezer.commands.sweep import cmd_sweep

            cmd_sweep(_args(temp_dir))

        config, param, values, out_path = mock_sweep.call_args.args
        assert param == "programs.0.steps.0.g"
        assert values == [-0.7, -0.82]
        assert out_path == temp_dir / "out" / "sweep_programs_0_steps_0_g.csv"
        captured = capsys.readouterr()
        assert "Sweeping programs.0.steps.0.g over 2 value(s)" in captured.out
        assert "2 row(s) written to" in captured.out

    def test_sweep_bad_path(self, temp_dir: Path, capsys: Any) -> None:
        """Test that an unreachable parameter exits with status 2."""
        with patch(
            "loop_squeezer.commands.sweep.sweep",
            side_effect=ConfigError("parameter path 'nowhere.x' not found at 'nowhere'"),
        ):
            from loop_squeezer.commands.sweep import cmd_sweep

            with pytest.raises(SystemExit) as exc:
                cmd_sweep(_args(temp_dir, param="nowhere.x"))

        assert exc.value.code == 2
        assert "Invalid config:" in capsys.readouterr().out

    def test_sweep_failure(self, temp_dir: Path, capsys: Any) -> None:
        """Test that a runtime error exits with status 1."""
        with patch("loop_squeezer.commands.sweep.sweep", side_effect=LoopSqueezerError("herald failed")):
            from loop_squeezer.commands.sweep import cmd_sweep

            with pytest.raises(SystemExit) as exc:
                cmd_sweep(_args(temp_dir))

        assert exc.value.code == 1
        assert "Sweep failed: herald failed" in capsys.readouterr().out

    @pytest.mark.integration
    def test_sweep_end_to_end(self, temp_dir: Path, sample_config: Dict[str, Any], capsys: Any) -> None:
        """A real phase-space sweep writes one row per value."""
        path = temp_dir / "sample.json"
        path.write_text(json.dumps(sample_config))

        from loop_squeezer.commands.sweep import cmd_sweep

        cmd_sweep(_args(temp_dir, config=str(path)))

        rows = read_csv_rows(temp_dir / "out" / "sweep_programs_0_steps_0_g.csv")
        assert [float(row["value"]) for row in rows] == [-0.7, -0.82]
        assert float(rows[1]["fidelity_ideal_theory"]) == pytest.approx(0.937, abs=0.01)
        assert "2 row(s) written to" in capsys.readouterr().out
