"""Tests for loop_squeezer.scheduler module."""

from pathlib import Path

import pytest

from loop_squeezer.constants import TABLE_II_X_STEPS
from loop_squeezer.errors import ScheduleError
from loop_squeezer.fs import read_csv_rows
from loop_squeezer.gates import GateProgram, LossScenario
from loop_squeezer.scheduler import (
    CSV_HEADERS,
    ControlSchedule,
    ScheduleEntry,
    TimingBudget,
    check_timing,
    compile_schedule,
    program_from_schedule,
)


@pytest.fixture
def three_step() -> GateProgram:
    """The published three-step x program."""
    return GateProgram.from_explicit_steps(TABLE_II_X_STEPS, LossScenario.preset("current"), "x chain")


class TestCompileSchedule:
    """Tests for compile_schedule."""

    def test_bins(self, three_step: GateProgram) -> None:
        """Load bin, one bin per step and the release bin."""
        schedule = compile_schedule(three_step)
        assert schedule.n_bins == 5
        assert schedule.n_steps == 3
        assert schedule.label == "x chain"

    def test_vbs_sequence(self, three_step: GateProgram) -> None:
        """The VBS is transparent at both ends and follows the program between."""
        assert compile_schedule(three_step).vbs_sequence == [0.0, 0.48, 0.75, 0.48, 0.0]

    def test_pulses_and_switch(self, three_step: GateProgram) -> None:
        """The cat arrives in bin 1; the last bin dumps the output."""
        entries = compile_schedule(three_step).entries
        assert [e.pulse for e in entries] == ["ancilla", "cat", "ancilla", "ancilla", "none"]
        assert [e.switch for e in entries] == ["to_loop"] * 4 + ["to_dump"]

    def test_measurement_settings(self, three_step: GateProgram) -> None:
        """Measured bins carry the homodyne basis and the gain."""
        entries = compile_schedule(three_step, characterization_deg=45.0).entries
        assert entries[0].hd_basis_deg is None
        assert [e.feedforward_gain for e in entries[1:4]] == [-0.96, 0.58, 1.04]
        assert entries[2].hd_basis_deg == 90.0
        assert entries[-1].hd_basis_deg == 45.0
        assert entries[-1].feedforward_gain is None

    def test_times(self, three_step: GateProgram) -> None:
        """Bin b starts at b tau."""
        entries = compile_schedule(three_step, tau_ns=50.0).entries
        assert [e.time_ns for e in entries] == [0.0, 50.0, 100.0, 150.0, 200.0]

    def test_settle_only_on_change(self) -> None:
        """A held reflectivity needs no settling time."""
        program = GateProgram.from_r_list([0.2, 0.2, 0.2])
        settle = [e.settle_ns for e in compile_schedule(program).entries]
        assert settle == [0.0, 30.0, 30.0, 0.0, 30.0]

    def test_empty_program(self) -> None:
        """Nothing to schedule."""
        with pytest.raises(ScheduleError):
            compile_schedule(GateProgram(()))

    def test_bad_tau(self, three_step: GateProgram) -> None:
        """The round trip must take time."""
        with pytest.raises(ScheduleError):
            compile_schedule(three_step, tau_ns=0.0)

    def test_characterization_defaults_to_target_quadrature(self, three_step: GateProgram) -> None:
        """Without an explicit basis the output is measured along the squeezed quadrature."""
        assert compile_schedule(three_step).entries[-1].hd_basis_deg == 90.0
        p_program = GateProgram.from_r_list([-0.33, -0.14], LossScenario.preset("current"))
        assert compile_schedule(p_program).entries[-1].hd_basis_deg == 0.0

    def test_vacuum_input_pulse(self, three_step: GateProgram) -> None:
        """A vacuum-input program labels bin 1 as vacuum, not cat."""
        entries = compile_schedule(three_step, input_kind="vacuum").entries
        assert [e.pulse for e in entries] == ["ancilla", "vacuum", "ancilla", "ancilla", "none"]

    def test_unknown_input_pulse(self, three_step: GateProgram) -> None:
        """Only cat and vacuum inputs are scheduled."""
        with pytest.raises(ScheduleError):
            compile_schedule(three_step, input_kind="fock")

    def test_program_round_trip(self, three_step: GateProgram) -> None:
        """The measured bins rebuild the same working conditions."""
        rebuilt = program_from_schedule(compile_schedule(three_step), LossScenario.preset("current"))
        assert [(s.R, s.phi_deg, s.gain, s.variant) for s in rebuilt.steps] == [
            (s.R, s.phi_deg, s.gain, s.variant) for s in three_step.steps
        ]


class TestControlSchedule:
    """Tests for ControlSchedule validation and export."""

    def _entries(self) -> list:
        return [
            ScheduleEntry(0, 0.0, 0.0, "to_loop", "ancilla"),
            ScheduleEntry(1, 60.8, 0.4, "to_loop", "cat", 90.0, -0.82, 30.0),
            ScheduleEntry(2, 121.6, 0.0, "to_dump", "none", None, None, 30.0),
        ]

    def test_valid(self) -> None:
        """A hand-built one-step schedule is accepted."""
        assert ControlSchedule(tuple(self._entries())).n_steps == 1

    def test_too_short(self) -> None:
        """Two bins cannot hold a step."""
        with pytest.raises(ScheduleError):
            ControlSchedule(tuple(self._entries()[:2]))

    def test_vbs_open_at_ends(self) -> None:
        """A reflecting VBS in bin 0 is refused."""
        entries = self._entries()
        entries[0] = ScheduleEntry(0, 0.0, 0.3, "to_loop", "ancilla")
        with pytest.raises(ScheduleError):
            ControlSchedule(tuple(entries))

    def test_off_grid(self) -> None:
        """Bins sit on multiples of tau."""
        entries = self._entries()
        entries[1] = ScheduleEntry(1, 61.0, 0.4, "to_loop", "cat")
        with pytest.raises(ScheduleError):
            ControlSchedule(tuple(entries))

    def test_unknown_switch(self) -> None:
        """The switch has two states."""
        entries = self._entries()
        entries[2] = ScheduleEntry(2, 121.6, 0.0, "sideways", "none")
        with pytest.raises(ScheduleError):
            ControlSchedule(tuple(entries))

    def test_json_round_trip(self, three_step: GateProgram) -> None:
        """JSON export rebuilds an equal schedule."""
        schedule = compile_schedule(three_step)
        assert ControlSchedule.from_json(schedule.to_json()) == schedule

    def test_csv(self, temp_dir: Path, three_step: GateProgram) -> None:
        """The CSV has one row per bin; unset fields are blank."""
        compile_schedule(three_step).to_csv(temp_dir / "schedule.csv")
        rows = read_csv_rows(temp_dir / "schedule.csv")
        assert len(rows) == 5
        assert list(rows[0]) == CSV_HEADERS
        assert rows[0]["hd_basis_deg"] == ""
        assert rows[1]["pulse"] == "cat"
        assert float(rows[2]["vbs_reflectivity"]) == pytest.approx(0.75)


class TestTiming:
    """Tests for the timing budget."""

    def test_current_loop(self) -> None:
        """The 60.8 ns loop runs at 16.4 MHz, below the 20 MHz limit."""
        report = check_timing(TimingBudget())
        assert report.feasible
        assert report.clock_mhz == pytest.approx(16.447, abs=1e-3)
        assert report.required_ns == pytest.approx(50.0)
        assert report.max_clock_mhz == pytest.approx(20.0)
        assert report.deficit_ns == 0.0

    def test_integrated_loop(self) -> None:
        """Picosecond pulses and fast components reach 10 GHz."""
        report = check_timing(TimingBudget(0.05, 0.04, 0.1))
        assert report.feasible
        assert report.clock_mhz == pytest.approx(10000.0)

    def test_short_loop(self) -> None:
        """A 40 ns loop misses the budget by 10 ns."""
        report = check_timing(TimingBudget(tau_ns=40.0))
        assert not report.feasible
        assert report.deficit_ns == pytest.approx(10.0)
        assert "infeasible" in report.describe()

    def test_from_components(self) -> None:
        """Rise/fall, ringing and jitter add up to the response."""
        budget = TimingBudget.from_components(jitter_ns=2.0)
        assert budget.component_response_ns == pytest.approx(32.0)

    def test_nonpositive(self) -> None:
        """Every duration is positive."""
        with pytest.raises(ValueError):
            TimingBudget(pulse_length_ns=0.0)
